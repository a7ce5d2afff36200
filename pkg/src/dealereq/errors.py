"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, SolverError -> 3,
VerificationFailure -> 4.
"""


class DealerEqError(Exception):
    """Base class for all package errors."""


class ConfigError(DealerEqError, ValueError):
    """Invalid run configuration or distribution specification."""


class DistributionError(ConfigError):
    """Rejected type-law input: non-log-concave density, grid underflow, etc."""


class SolverError(DealerEqError, RuntimeError):
    """Numerical solve failed to converge or left its certified region."""


class SandwichViolation(SolverError):
    """An ODE trajectory left the upper/lower solution corridor."""


class IncompatibleSchedules(DealerEqError, ValueError):
    """Heterogeneous quotes whose marginal-price envelopes do not overlap."""


class OracleRangeError(DealerEqError, RuntimeError):
    """Brute-force search hit its range boundary; widen the search window."""


class VerificationFailure(DealerEqError, RuntimeError):
    """A verification suite reported a failing check."""
