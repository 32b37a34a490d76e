"""
Exception classes for dc-gsocp.

Every error carries a stable ``code`` string and a ``details`` dict so the CLI
and callers can react without parsing messages.
"""

from typing import Any

from .constants import (
    CONFIG_FILE_NOT_FOUND_ERROR,
    DIMENSION_ERROR,
    DOMAIN_GROWTH_ERROR,
    DOMAIN_VIOLATION_ERROR,
    GH_ORDER_TOO_LARGE_ERROR,
    GH_ORDER_TOO_SMALL_ERROR,
    LATTICE_INVARIANT_ERROR,
    LOG_DOMAIN_ERROR,
    MAX_GH_ORDER,
    MIN_GH_ORDER,
    NONFINITE_COEFFICIENT_ERROR,
    POLICY_NOT_RECORDED_ERROR,
    TREE_BUDGET_ERROR,
    TRINOMIAL_VOLATILITY_ERROR,
    UNKNOWN_PROBLEM_ERROR,
)
from .definitions import PathLike


class GsocpError(Exception):
    """Base exception for all dc-gsocp errors."""

    def __init__(
        self,
        message: str,
        code: str | None = None,
        details: dict[str, Any] | None = None,
    ) -> None:
        """Initialize the exception.

        Args:
            message: Exception message
            code: Optional error code
            details: Optional error details
        """
        super().__init__(message)
        self.message = message
        self.code = code or "error"
        self.details = details or {}


#
# Configuration
#


class ConfigurationError(GsocpError):
    """Exception raised for invalid run configuration."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, "configuration_error", details)


class ConfigFileNotFoundError(ConfigurationError):
    """Exception raised when a configuration file does not exist."""

    def __init__(self, path: PathLike) -> None:
        super().__init__(CONFIG_FILE_NOT_FOUND_ERROR.format(path), {"path": str(path)})
        self.code = "config_file_not_found"


class UnknownProblemError(GsocpError):
    """Exception raised when a problem name is not registered."""

    def __init__(self, name: str, available: list[str]) -> None:
        super().__init__(
            UNKNOWN_PROBLEM_ERROR.format(name, ", ".join(available)),
            "unknown_problem",
            {"name": name, "available": available},
        )


#
# Lattices
#


class LatticeError(GsocpError):
    """Base exception for lattice construction failures."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, "lattice_error", details)


class InvalidOrderError(LatticeError):
    """Exception raised for a Gauss-Hermite order below the minimum."""

    def __init__(self, order: int) -> None:
        super().__init__(GH_ORDER_TOO_SMALL_ERROR.format(MIN_GH_ORDER, order))
        self.code = "invalid_order"
        self.details = {"order": order}


class UnsupportedOrderError(LatticeError):
    """Exception raised for a Gauss-Hermite order above the supported maximum."""

    def __init__(self, order: int) -> None:
        super().__init__(GH_ORDER_TOO_LARGE_ERROR.format(order, MAX_GH_ORDER))
        self.code = "unsupported_order"
        self.details = {"order": order}


class InvalidVolatilityError(LatticeError):
    """Exception raised when the trinomial lattice is asked for sigma > 1."""

    def __init__(self, sigma: float) -> None:
        super().__init__(TRINOMIAL_VOLATILITY_ERROR.format(sigma))
        self.code = "invalid_volatility"
        self.details = {"sigma": sigma}


class LatticeInvariantError(LatticeError):
    """Exception raised when a constructed lattice breaks its own invariants."""

    def __init__(self, reason: str) -> None:
        super().__init__(LATTICE_INVARIANT_ERROR.format(reason), {"reason": reason})
        self.code = "lattice_invariant"


#
# Numerical domain errors
#


class DomainError(GsocpError, ValueError):
    """Exception raised when an argument lies outside its mathematical domain."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, "domain_error", details)


class InvalidParameterError(GsocpError, ValueError):
    """Exception raised for an out-of-range numeric parameter."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, "invalid_parameter", details)


class DegenerateParameterError(InvalidParameterError):
    """Exception raised when parameters make a closed form singular."""

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message, details)
        self.code = "degenerate_parameter"


class UnsupportedDimensionError(InvalidParameterError):
    """Exception raised for Brownian dimensions the solver does not handle."""

    def __init__(self, dimension: int) -> None:
        super().__init__(DIMENSION_ERROR.format(dimension), {"m": dimension})
        self.code = "unsupported_dimension"


class LogDomainError(DomainError):
    """Exception raised when a log-log fit meets a nonpositive value."""

    def __init__(self, values: Any) -> None:
        super().__init__(LOG_DOMAIN_ERROR.format(values))
        self.code = "log_domain_error"


#
# Solver failures
#


class SolverError(GsocpError):
    """Base exception for failures during a backward sweep."""

    def __init__(
        self,
        message: str,
        code: str = "solver_error",
        details: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message, code, details)


class CoefficientEvaluationError(SolverError):
    """Exception raised when a coefficient returns a non-finite value."""

    def __init__(self, name: str, t: float, x: float, a: float) -> None:
        super().__init__(
            NONFINITE_COEFFICIENT_ERROR.format(name, t, x, a),
            "coefficient_evaluation_error",
            {"coefficient": name, "t": t, "x": x, "a": a},
        )
        self.t = t
        self.x = x
        self.a = a


class DomainGrowthError(SolverError):
    """Exception raised when the reachable-domain estimate diverges."""

    def __init__(self, level: int) -> None:
        super().__init__(
            DOMAIN_GROWTH_ERROR.format(level),
            "domain_growth_error",
            {"level": level},
        )


class DomainViolationError(SolverError):
    """Exception raised in strict mode when a successor leaves the grid."""

    def __init__(self, level: int, count: int) -> None:
        super().__init__(
            DOMAIN_VIOLATION_ERROR.format(count, level),
            "domain_violation",
            {"level": level, "count": count},
        )


class PolicyNotRecordedError(SolverError):
    """Exception raised when a policy is requested from a policy-free solve."""

    def __init__(self) -> None:
        super().__init__(POLICY_NOT_RECORDED_ERROR, "policy_not_recorded")


class BudgetExceededError(SolverError):
    """Exception raised when an exhaustive tree would not fit the budget."""

    def __init__(
        self,
        n_steps: int,
        leaves: int,
        max_steps: int,
        max_leaves: int,
    ) -> None:
        super().__init__(
            TREE_BUDGET_ERROR.format(n_steps, leaves, max_steps, max_leaves),
            "budget_exceeded",
            {"n_steps": n_steps, "leaves": leaves},
        )
