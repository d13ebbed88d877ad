"""Exception and warning types shared across the package."""


class TailprodError(Exception):
    """Base class for all package-specific errors."""


class DomainError(TailprodError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedError(TailprodError):
    """The operation is not defined for this distribution or configuration."""


class UnsupportedMarginalError(UnsupportedError):
    """A construction requires a marginal family outside the supported catalog."""


class NoLimitError(TailprodError):
    """A kernel has no finite limit at infinity (numeric probe failed to stabilize)."""


class RejectionStallError(TailprodError):
    """Rejection sampling acceptance probability is too small to make progress."""


class NotCdError(TailprodError):
    """The model is not conditionally dependent; the requested prediction is undefined."""


class DivergentError(TailprodError):
    """A required moment or constant is divergent."""


class QuadratureError(TailprodError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ContractionError(TailprodError):
    """The discount-moment contraction condition fails (infinite-horizon undefined)."""


class ValidationError(TailprodError):
    """A model failed its mandatory validity checks."""


class ConfigError(TailprodError, ValueError):
    """An experiment configuration is malformed."""


class InsufficientHitsWarning(UserWarning):
    """A Monte Carlo threshold collected too few hits for a reliable interval."""


class CaseIIOnlyWarning(UserWarning):
    """Only the weaker moment condition holds; the asymptotic prediction is flagged."""
