"""Effective-type distribution machinery.

The client's signal S and inventory M collapse into a single scalar that
drives every trade decision: the effective type Y = S - gamma_c * M. The
pricing layers only ever consume functionals of the law of Y:

* density f, cdf F, survival Fbar,
* hazard ratios F/f (nondecreasing) and Fbar/f (nonincreasing),
* conditional payoff mean g(y) = E[V | Y = y] and its slope g',
* payoff-weighted integrals H(y) = int_{-inf}^y f*g and Hbar(y) = int_y^inf f*g.

Gaussian primitives get exact closed forms, including the linear projection
g(y) = (1-beta)*mu_Y + gamma_c*mu_M + beta*y. The two-sided exponential family
and user-supplied log-concave densities share a deterministic grid-convolution
backend: trapezoid convolution on a fixed wide grid, cubic interpolation
between nodes, and exponential tail continuation beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import log_ndtr, ndtr

from .errors import DistributionError

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Grid-convolution backend knobs: +-12 dispersion units, 2**14 nodes.
_CONV_HALF_WIDTH_SIGMAS = 12.0
_CONV_POINTS = 2**14

GAUSSIAN = "gaussian"
TWO_SIDED_EXPONENTIAL = "two_sided_exponential"
CUSTOM_LOGCONCAVE = "custom_logconcave"
_FAMILIES = (GAUSSIAN, TWO_SIDED_EXPONENTIAL, CUSTOM_LOGCONCAVE)


def _std_norm_logpdf(z):
    return -0.5 * z * z - _LOG_SQRT_2PI


def mills_ratio(z):
    """Phi(z)/phi(z) for the standard normal, stable in both tails."""
    return np.exp(log_ndtr(z) - _std_norm_logpdf(z))


def _as1d(y):
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1), True
    return arr, False


@dataclass(frozen=True)
class DistributionSpec:
    """Primitives of the client's type: signal S and inventory M.

    ``sigma_s``/``sigma_m`` are the family scale parameters: the standard
    deviation for the Gaussian family and the exponential scale b (density
    exp(-|x-mu|/b)/(2b)) for the two-sided exponential family. The custom
    family supplies positive log-concave densities directly; the scales then
    act as grid-sizing hints. The payoff noise is mean zero and independent of
    (S, M), so its law never enters g.
    """

    family: str = GAUSSIAN
    mu_s: float = 0.0
    sigma_s: float = 1.0
    mu_m: float = 0.0
    sigma_m: float = 1.0
    density_s: Callable[[np.ndarray], np.ndarray] | None = None
    density_m: Callable[[np.ndarray], np.ndarray] | None = None

    def validate(self) -> None:
        if self.family not in _FAMILIES:
            raise DistributionError(f"unknown family {self.family!r}")
        if not (self.sigma_s > 0.0 and self.sigma_m > 0.0):
            raise DistributionError("scale parameters must be positive")
        if self.family == CUSTOM_LOGCONCAVE and (
            self.density_s is None or self.density_m is None
        ):
            raise DistributionError(
                "custom_logconcave needs density_s and density_m callables"
            )

    def std_s(self) -> float:
        if self.family == TWO_SIDED_EXPONENTIAL:
            return self.sigma_s * math.sqrt(2.0)
        return self.sigma_s

    def std_m(self) -> float:
        if self.family == TWO_SIDED_EXPONENTIAL:
            return self.sigma_m * math.sqrt(2.0)
        return self.sigma_m


@dataclass
class EfronReport:
    """Finite-difference sweep of the conditional-mean slope g' over a grid."""

    min_gprime: float
    max_gprime: float
    passed: bool
    tol: float = 1e-9
    grid_size: int = 0


class TypeLaw:
    """Distribution bundle of the effective type Y = S - gamma_c * M.

    Immutable after construction; all evaluators accept scalars or arrays and
    are safe for concurrent read access.
    """

    spec: DistributionSpec
    gamma_c: float
    mu_y: float
    sigma_y: float
    beta: float | None  # Gaussian projection coefficient, None otherwise
    mean_v: float  # E[V] = E[S]

    def f(self, y):
        raise NotImplementedError

    def F(self, y):
        raise NotImplementedError

    def Fbar(self, y):
        raise NotImplementedError

    def g(self, y):
        raise NotImplementedError

    def g_prime(self, y):
        raise NotImplementedError

    def H(self, y):
        raise NotImplementedError

    def Hbar(self, y):
        raise NotImplementedError

    def hazard_minus(self, y):
        """(F/f)(y); saturates at its asymptotic tail value when F underflows."""
        raise NotImplementedError

    def hazard_plus(self, y):
        """(Fbar/f)(y); mirror of hazard_minus."""
        raise NotImplementedError

    def hazard_minus_prime(self, y):
        raise NotImplementedError

    def hazard_plus_prime(self, y):
        raise NotImplementedError

    def hazard_saturated(self, y) -> bool:
        """True where hazard values come from the asymptotic tail continuation
        rather than direct evaluation. Always False for closed-form laws."""
        return False

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    # Composite increasing functions shared by the pricing layers.
    def phi_minus(self, y):
        """F/f + id - g; its root is the monopolist bid edge y_minus."""
        return self.hazard_minus(y) + y - self.g(y)

    def phi_plus(self, y):
        """-Fbar/f + id - g; its root is the monopolist ask edge y_plus."""
        return -self.hazard_plus(y) + y - self.g(y)

    def id_minus_g(self, y):
        return y - self.g(y)


class GaussianTypeLaw(TypeLaw):
    def __init__(self, spec: DistributionSpec, gamma_c: float):
        self.spec = spec
        self.gamma_c = gamma_c
        self.mu_y = spec.mu_s - gamma_c * spec.mu_m
        var_y = spec.sigma_s**2 + (gamma_c * spec.sigma_m) ** 2
        self.sigma_y = math.sqrt(var_y)
        self.beta = spec.sigma_s**2 / var_y
        self.mean_v = spec.mu_s

    def _z(self, y):
        return (np.asarray(y, dtype=float) - self.mu_y) / self.sigma_y

    def f(self, y):
        return np.exp(_std_norm_logpdf(self._z(y))) / self.sigma_y

    def F(self, y):
        return ndtr(self._z(y))

    def Fbar(self, y):
        return ndtr(-self._z(y))

    def g(self, y):
        y = np.asarray(y, dtype=float)
        return (1.0 - self.beta) * self.mu_y + self.gamma_c * self.spec.mu_m + self.beta * y

    def g_prime(self, y):
        return np.full_like(np.asarray(y, dtype=float), self.beta)

    def H(self, y):
        z = self._z(y)
        return self.mean_v * ndtr(z) - self.beta * self.sigma_y * np.exp(_std_norm_logpdf(z))

    def Hbar(self, y):
        z = self._z(y)
        return self.mean_v * ndtr(-z) + self.beta * self.sigma_y * np.exp(_std_norm_logpdf(z))

    def hazard_minus(self, y):
        return self.sigma_y * mills_ratio(self._z(y))

    def hazard_plus(self, y):
        return self.sigma_y * mills_ratio(-self._z(y))

    def hazard_minus_prime(self, y):
        z = self._z(y)
        return 1.0 + z * mills_ratio(z)

    def hazard_plus_prime(self, y):
        z = self._z(y)
        return z * mills_ratio(-z) - 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mu_y, self.sigma_y, size)


def _laplace_density(mu: float, b: float) -> Callable[[np.ndarray], np.ndarray]:
    def dens(x):
        return np.exp(-np.abs(np.asarray(x, dtype=float) - mu) / b) / (2.0 * b)

    return dens


def _check_log_concave(dens, center: float, half_width: float, name: str) -> None:
    xs = np.linspace(center - half_width, center + half_width, 401)
    vals = np.asarray(dens(xs), dtype=float)
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        raise DistributionError(f"{name}: density must be finite and positive")
    second = np.diff(np.log(vals), 2)
    if np.max(second) > 1e-8 * max(1.0, float(np.max(np.abs(second)))):
        raise DistributionError(f"{name}: density failed the log-concavity spot check")


class GridTypeLaw(TypeLaw):
    """Numeric-convolution law for non-Gaussian primitives.

    f is the trapezoid convolution of f_S with the density of -gamma_c*M on a
    fixed 2**14-node grid spanning +-12 dispersion units; g is the payoff-
    weighted convolution divided by f. Outside the grid, log f and g continue
    linearly (exponential tails), so the hazard ratios saturate at their
    asymptotic values instead of blowing up on underflow.
    """

    def __init__(self, spec: DistributionSpec, gamma_c: float):
        self.spec = spec
        self.gamma_c = gamma_c
        self.beta = None

        if spec.family == TWO_SIDED_EXPONENTIAL:
            dens_s = _laplace_density(spec.mu_s, spec.sigma_s)
            dens_m = _laplace_density(spec.mu_m, spec.sigma_m)
        else:
            dens_s, dens_m = spec.density_s, spec.density_m
            _check_log_concave(dens_s, spec.mu_s, 6.0 * spec.std_s(), "density_s")
            _check_log_concave(dens_m, spec.mu_m, 6.0 * spec.std_m(), "density_m")

        mu_y = spec.mu_s - gamma_c * spec.mu_m
        sigma_hat = math.sqrt(spec.std_s() ** 2 + (gamma_c * spec.std_m()) ** 2)
        half = _CONV_HALF_WIDTH_SIGMAS * sigma_hat
        n = _CONV_POINTS
        # Sample S and X = -gamma_c*M each on a +-half window around their
        # means; the discrete convolution then covers mu_y +- 2*half and the
        # central mu_y +- half band is kept.
        s_grid = np.linspace(spec.mu_s - half, spec.mu_s + half, n)
        dx = s_grid[1] - s_grid[0]
        x_grid = np.linspace(-gamma_c * spec.mu_m - half, -gamma_c * spec.mu_m + half, n)
        fs = np.asarray(dens_s(s_grid), dtype=float)
        fx = np.asarray(dens_m(-x_grid / gamma_c), dtype=float) / gamma_c
        if not (np.all(np.isfinite(fs)) and np.all(np.isfinite(fx))):
            raise DistributionError("primitive density evaluated to a non-finite value")
        if fs.max() <= 0.0 or fx.max() <= 0.0:
            raise DistributionError("convolution grid underflow: domain too wide")

        conv = np.convolve(fs, fx) * dx
        conv_num = np.convolve(s_grid * fs, fx) * dx
        full_grid = (s_grid[0] + x_grid[0]) + dx * np.arange(2 * n - 1)
        keep = (full_grid >= mu_y - half - 0.5 * dx) & (full_grid <= mu_y + half + 0.5 * dx)
        ys = full_grid[keep]
        f_vals = conv[keep]
        num_vals = conv_num[keep]
        if np.any(f_vals <= 0.0):
            raise DistributionError("convolution grid underflow: domain too wide")

        log_f = np.log(f_vals)
        edge = max(8, len(ys) // 64)
        lam_l = (log_f[edge] - log_f[0]) / (ys[edge] - ys[0])
        lam_r = (log_f[-1] - log_f[-1 - edge]) / (ys[-1] - ys[-1 - edge])
        if not (lam_l > 0.0 and lam_r < 0.0):
            raise DistributionError("density tails are not decaying on the grid")

        # Normalize total mass to 1, counting exponential-tail mass beyond the
        # grid; the residual is the quadrature error of the backend.
        tail_mass_l = f_vals[0] / lam_l
        tail_mass_r = f_vals[-1] / (-lam_r)
        increments = 0.5 * (f_vals[1:] + f_vals[:-1]) * np.diff(ys)
        total = tail_mass_l + float(np.sum(increments)) + tail_mass_r
        if abs(total - 1.0) > 1e-3:
            raise DistributionError(
                f"convolution mass {total:.6f} too far from 1; domain too wide"
            )
        f_vals /= total
        num_vals /= total
        tail_mass_l /= total
        tail_mass_r /= total
        increments /= total
        log_f -= math.log(total)

        g_vals = num_vals / f_vals
        F_vals = tail_mass_l + np.concatenate(([0.0], np.cumsum(increments)))
        Fbar_vals = tail_mass_r + np.concatenate(
            ([0.0], np.cumsum(increments[::-1]))
        )[::-1]

        gp_edge_l = (g_vals[edge] - g_vals[0]) / (ys[edge] - ys[0])
        gp_edge_r = (g_vals[-1] - g_vals[-1 - edge]) / (ys[-1] - ys[-1 - edge])
        h_vals = f_vals * g_vals
        h_increments = 0.5 * (h_vals[1:] + h_vals[:-1]) * np.diff(ys)
        # Exponential-tail payoff mass: int f*(g(edge) + g'*(y-edge)) dy.
        tail_h_l = tail_mass_l * (g_vals[0] - gp_edge_l / lam_l)
        tail_h_r = tail_mass_r * (g_vals[-1] - gp_edge_r / lam_r)
        H_vals = tail_h_l + np.concatenate(([0.0], np.cumsum(h_increments)))

        self.mu_y = float(mu_y)
        self.sigma_y = float(sigma_hat)
        self.mean_v = float(H_vals[-1] + tail_h_r)
        self._ys = ys
        self._lam_l, self._lam_r = float(lam_l), float(lam_r)
        self._gp_l, self._gp_r = float(gp_edge_l), float(gp_edge_r)
        self._logf_edge_l, self._logf_edge_r = float(log_f[0]), float(log_f[-1])
        self._F0, self._FbarN = float(F_vals[0]), float(Fbar_vals[-1])
        self._g0, self._g1 = float(g_vals[0]), float(g_vals[-1])
        self._F_nodes = F_vals
        self._logf_interp = PchipInterpolator(ys, log_f, extrapolate=False)
        self._F_interp = PchipInterpolator(ys, F_vals, extrapolate=False)
        self._Fbar_interp = PchipInterpolator(ys, Fbar_vals, extrapolate=False)
        self._g_interp = PchipInterpolator(ys, g_vals, extrapolate=False)
        self._H_interp = PchipInterpolator(ys, H_vals, extrapolate=False)
        self._fd_step = 1e-5 * self.sigma_y

    def _piecewise(self, y, lo_fn, mid_fn, hi_fn):
        arr, scalar = _as1d(y)
        lo = arr < self._ys[0]
        hi = arr > self._ys[-1]
        mid = ~(lo | hi)
        out = np.empty_like(arr)
        if lo.any():
            out[lo] = lo_fn(arr[lo])
        if mid.any():
            out[mid] = mid_fn(arr[mid])
        if hi.any():
            out[hi] = hi_fn(arr[hi])
        return float(out[0]) if scalar else out

    def log_f(self, y):
        return self._piecewise(
            y,
            lambda v: self._logf_edge_l + self._lam_l * (v - self._ys[0]),
            self._logf_interp,
            lambda v: self._logf_edge_r + self._lam_r * (v - self._ys[-1]),
        )

    def f(self, y):
        return np.exp(self.log_f(y))

    def F(self, y):
        return self._piecewise(
            y,
            lambda v: self._F0 * np.exp(self._lam_l * (v - self._ys[0])),
            self._F_interp,
            lambda v: 1.0 - self._FbarN * np.exp(self._lam_r * (v - self._ys[-1])),
        )

    def Fbar(self, y):
        return self._piecewise(
            y,
            lambda v: 1.0 - self._F0 * np.exp(self._lam_l * (v - self._ys[0])),
            self._Fbar_interp,
            lambda v: self._FbarN * np.exp(self._lam_r * (v - self._ys[-1])),
        )

    def g(self, y):
        return self._piecewise(
            y,
            lambda v: self._g0 + self._gp_l * (v - self._ys[0]),
            self._g_interp,
            lambda v: self._g1 + self._gp_r * (v - self._ys[-1]),
        )

    def g_prime(self, y):
        h = self._fd_step
        y = np.asarray(y, dtype=float)
        return (self.g(y + h) - self.g(y - h)) / (2.0 * h)

    def H(self, y):
        def lo(v):
            mass = self._F0 * np.exp(self._lam_l * (v - self._ys[0]))
            return mass * (self.g(v) - self._gp_l / self._lam_l)

        def hi(v):
            mass = self._FbarN * np.exp(self._lam_r * (v - self._ys[-1]))
            return self.mean_v - mass * (self.g(v) - self._gp_r / self._lam_r)

        return self._piecewise(y, lo, self._H_interp, hi)

    def Hbar(self, y):
        return self.mean_v - self.H(y)

    def hazard_minus(self, y):
        # Constant saturation in the far left tail (exact for an exponential
        # tail: F ~ f/lam there); 1/f growth in the far right tail.
        return self._piecewise(
            y,
            lambda v: np.full_like(v, self._F0 / math.exp(self._logf_edge_l)),
            lambda v: self._F_interp(v) / np.exp(self._logf_interp(v)),
            lambda v: (1.0 - self._FbarN * np.exp(self._lam_r * (v - self._ys[-1])))
            * np.exp(-(self._logf_edge_r + self._lam_r * (v - self._ys[-1]))),
        )

    def hazard_plus(self, y):
        return self._piecewise(
            y,
            lambda v: (1.0 - self._F0 * np.exp(self._lam_l * (v - self._ys[0])))
            * np.exp(-(self._logf_edge_l + self._lam_l * (v - self._ys[0]))),
            lambda v: self._Fbar_interp(v) / np.exp(self._logf_interp(v)),
            lambda v: np.full_like(v, self._FbarN / math.exp(self._logf_edge_r)),
        )

    def hazard_minus_prime(self, y):
        h = 10.0 * self._fd_step
        y = np.asarray(y, dtype=float)
        return (self.hazard_minus(y + h) - self.hazard_minus(y - h)) / (2.0 * h)

    def hazard_plus_prime(self, y):
        h = 10.0 * self._fd_step
        y = np.asarray(y, dtype=float)
        return (self.hazard_plus(y + h) - self.hazard_plus(y - h)) / (2.0 * h)

    def hazard_saturated(self, y) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.any(y < self._ys[0]) or np.any(y > self._ys[-1]))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.uniform(self._F0, 1.0 - self._FbarN, size)
        return np.interp(u, self._F_nodes, self._ys)


def build_typelaw(spec: DistributionSpec, gamma_c: float) -> TypeLaw:
    """Construct the law of Y = S - gamma_c*M from the primitives in ``spec``."""
    spec.validate()
    if not gamma_c > 0.0:
        raise DistributionError("gamma_c must be positive")
    if spec.family == GAUSSIAN:
        return GaussianTypeLaw(spec, gamma_c)
    return GridTypeLaw(spec, gamma_c)


def efron_check(tl: TypeLaw, grid) -> EfronReport:
    """Sweep finite-difference slopes of g over ``grid``.

    Passes when every slope estimate sits strictly inside (0, 1): the slope of
    the conditional mean is the adverse-selection intensity, and log-concave
    primitives keep it there.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    h = 1e-5 * tl.sigma_y
    slopes = (tl.g(grid + h) - tl.g(grid - h)) / (2.0 * h)
    lo, hi = float(np.min(slopes)), float(np.max(slopes))
    tol = 1e-9
    return EfronReport(
        min_gprime=lo,
        max_gprime=hi,
        passed=bool(lo > tol and hi < 1.0 - tol),
        tol=tol,
        grid_size=int(grid.size),
    )
