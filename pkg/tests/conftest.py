import math
import sys
from pathlib import Path

import numpy as np
import pytest

try:
    import dealereq  # noqa: F401
except ImportError:  # running from a checkout without install
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hypothesis import settings

from dealereq import (
    DistributionSpec,
    SolverConfig,
    build_typelaw,
    monopoly_schedule,
    solve_equilibrium_ode,
)

settings.register_profile("suite", max_examples=25, deadline=None)
settings.load_profile("suite")


def gauss_beta(beta: float, sigma_y: float = 1.0, gamma_c: float = 1.0,
               mu_s: float = 0.0, mu_m: float = 0.0):
    """Gaussian law with a prescribed projection coefficient and dispersion."""
    spec = DistributionSpec(
        family="gaussian",
        mu_s=mu_s,
        sigma_s=math.sqrt(beta) * sigma_y,
        mu_m=mu_m,
        sigma_m=math.sqrt(1.0 - beta) * sigma_y / gamma_c,
    )
    return build_typelaw(spec, gamma_c)


def two_sided_n_grid(half_width: float, per_side: int) -> np.ndarray:
    return np.concatenate(
        [
            np.linspace(-half_width, 0.0, per_side + 1)[:-1],
            np.linspace(0.0, half_width, per_side + 1)[1:],
        ]
    )


@pytest.fixture(scope="session")
def tl_base():
    """Standard-normal primitives: S, M ~ N(0,1), gamma_c = 1 (beta = 1/2)."""
    return build_typelaw(DistributionSpec("gaussian", 0.0, 1.0, 0.0, 1.0), 1.0)


@pytest.fixture(scope="session")
def tl_unit():
    """Unit-variance effective type with beta = 1/2."""
    return gauss_beta(0.5, sigma_y=1.0)


@pytest.fixture(scope="session")
def tl_055():
    return gauss_beta(0.55, sigma_y=1.0)


@pytest.fixture(scope="session")
def laplace_sym():
    """Two-sided exponential S, M with unit scales: g(y) = y/2 exactly."""
    return build_typelaw(
        DistributionSpec("two_sided_exponential", 0.0, 1.0, 0.0, 1.0), 1.0
    )


@pytest.fixture(scope="session")
def laplace_mix():
    """Two-sided exponential with unequal scales: nonlinear conditional mean."""
    return build_typelaw(
        DistributionSpec("two_sided_exponential", 0.0, 1.0, 0.0, 0.7), 1.0
    )


@pytest.fixture(scope="session")
def sol_base(tl_base):
    return solve_equilibrium_ode(
        tl_base, 2, 1.0, 0.0, SolverConfig(n_minus=-3.0, n_plus=3.0)
    )


@pytest.fixture(scope="session")
def sol_base_gd04(tl_base):
    return solve_equilibrium_ode(
        tl_base, 2, 1.0, 0.4, SolverConfig(n_minus=-3.0, n_plus=3.0)
    )


@pytest.fixture(scope="session")
def sol_055(tl_055):
    return solve_equilibrium_ode(tl_055, 2, 1.0, 0.0)


@pytest.fixture(scope="session")
def mon_base(tl_base):
    return monopoly_schedule(tl_base, 1.0, 0.0, two_sided_n_grid(6.0, 120))


@pytest.fixture(scope="session")
def mon_unit(tl_unit):
    return monopoly_schedule(tl_unit, 1.0, 0.0, two_sided_n_grid(4.0, 100))
