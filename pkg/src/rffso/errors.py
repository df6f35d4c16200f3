"""Exception hierarchy shared across the package."""


class RffsoError(Exception):
    """Base class for all package errors."""


class ConfigError(RffsoError):
    """Invalid parameter record or scenario configuration."""


class DomainError(RffsoError):
    """Input outside the mathematical domain of an operation."""


class EvaluationError(RffsoError):
    """Numerical evaluation failed."""


class PoleSeparationError(EvaluationError):
    """No vertical contour separates the two pole families."""


class ConvergenceError(EvaluationError):
    """Requested tolerance not reached within the evaluation budget.

    Carries the best value and the achieved error estimate so callers can
    decide whether to accept a degraded result.
    """

    def __init__(self, message, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class CostBudgetError(EvaluationError):
    """Evaluation aborted because the node budget would be exceeded."""
