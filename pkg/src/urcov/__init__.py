"""Joint SIR coverage of successive receptions in Poisson cellular downlinks."""

__version__ = "0.1.0"

from urcov.coverage import (  # noqa: E402
    BoundKind,
    coverage,
    coverage_bound,
    coverage_exact,
    coverage_inverse,
)
from urcov.errors import ConvergenceError, DomainError, RangeError, UnsupportedKindError  # noqa: E402
from urcov.rate import (  # noqa: E402
    check_binding,
    fullcsi_average_rate,
    rate_bound,
    rate_max_exact,
)
from urcov.simulator import Mode, SimConfig, correlation_gain, simulate_joint_coverage  # noqa: E402
from urcov.specfun import EvalConfig, ModelParams, c_n  # noqa: E402

__all__ = [
    "BoundKind",
    "ConvergenceError",
    "DomainError",
    "EvalConfig",
    "Mode",
    "ModelParams",
    "RangeError",
    "SimConfig",
    "UnsupportedKindError",
    "c_n",
    "check_binding",
    "correlation_gain",
    "coverage",
    "coverage_bound",
    "coverage_exact",
    "coverage_inverse",
    "fullcsi_average_rate",
    "rate_bound",
    "rate_max_exact",
    "simulate_joint_coverage",
]
