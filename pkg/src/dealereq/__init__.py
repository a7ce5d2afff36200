"""Dealer price schedules under adverse selection and inventory costs.

Library layout: ``typelaw`` holds the effective-type distribution bundle,
``client`` price schedules and optimal responses, ``monopoly`` the closed-form
single-dealer schedule, ``oligopoly`` the sandwiched equilibrium ODE solve,
``oracle`` the brute-force verification machinery, and ``cli`` the dealer-eq
command-line harness.
"""

from .client import (
    AdmissibilityReport,
    ClientResponse,
    CompatibilityReport,
    PriceSchedule,
    check_admissible,
    check_compatible,
    eval_client_objective,
    heterogeneous_response,
    quadratic_schedule,
    symmetric_response,
)
from .errors import (
    ConfigError,
    DealerEqError,
    DistributionError,
    IncompatibleSchedules,
    OracleRangeError,
    SandwichViolation,
    SolverError,
    VerificationFailure,
)
from .monopoly import (
    ConvexityReport,
    MonopolyResult,
    ZMonResult,
    monopoly_convexity_check,
    monopoly_profit,
    monopoly_schedule,
    spread_roots,
    z_mon_threshold,
)
from .oligopoly import (
    Envelopes,
    EquilibriumCertificate,
    OdeCoefficients,
    OliBoundResult,
    SandwichSolution,
    SolverConfig,
    choose_epsilons,
    competitive_upper_solution,
    envelopes,
    estimate_coefficients,
    gaussian_oli_bound,
    ode_rhs,
    solve_equilibrium_ode,
    verify_f_oli,
)
from .oracle import (
    DeviationSpec,
    EtaFunctions,
    NashSuiteReport,
    PointwiseReport,
    build_deviation,
    client_grid_oracle,
    dealer_profit_deviation,
    monte_carlo_profit,
    nash_deviation_suite,
    pointwise_optimality_check,
    random_deviations,
)
from .typelaw import (
    DistributionSpec,
    EfronReport,
    GaussianTypeLaw,
    GridTypeLaw,
    TypeLaw,
    build_typelaw,
    efron_check,
    mills_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "ClientResponse",
    "CompatibilityReport",
    "ConfigError",
    "ConvexityReport",
    "DealerEqError",
    "DeviationSpec",
    "DistributionError",
    "DistributionSpec",
    "EfronReport",
    "Envelopes",
    "EquilibriumCertificate",
    "EtaFunctions",
    "GaussianTypeLaw",
    "GridTypeLaw",
    "IncompatibleSchedules",
    "MonopolyResult",
    "NashSuiteReport",
    "OdeCoefficients",
    "OliBoundResult",
    "OracleRangeError",
    "PointwiseReport",
    "PriceSchedule",
    "SandwichSolution",
    "SandwichViolation",
    "SolverConfig",
    "SolverError",
    "TypeLaw",
    "VerificationFailure",
    "ZMonResult",
    "build_deviation",
    "build_typelaw",
    "check_admissible",
    "check_compatible",
    "choose_epsilons",
    "client_grid_oracle",
    "competitive_upper_solution",
    "dealer_profit_deviation",
    "efron_check",
    "envelopes",
    "estimate_coefficients",
    "eval_client_objective",
    "gaussian_oli_bound",
    "heterogeneous_response",
    "mills_ratio",
    "monopoly_convexity_check",
    "monopoly_profit",
    "monopoly_schedule",
    "monte_carlo_profit",
    "nash_deviation_suite",
    "ode_rhs",
    "pointwise_optimality_check",
    "quadratic_schedule",
    "random_deviations",
    "solve_equilibrium_ode",
    "spread_roots",
    "symmetric_response",
    "verify_f_oli",
    "z_mon_threshold",
]
