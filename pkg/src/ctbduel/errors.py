"""Exception types raised across the package."""


class CTBError(Exception):
    """Base class for every error raised by ctbduel."""


class ConfigurationError(CTBError, ValueError):
    """Inputs that cannot describe a valid problem or run."""


class InvalidPairError(CTBError, ValueError):
    """An arm was paired with itself, or a pair was given out of order."""


class BoundaryError(CTBError, ValueError):
    """A point lies on (or within tolerance of) a winning-space boundary."""


class DegenerateCandidateError(CTBError, RuntimeError):
    """Every finite-score cell names the same best arm, so no duel can be formed."""

    def __init__(self, message, arm=None):
        super().__init__(message)
        self.arm = arm


class RenormalizationError(CTBError, FloatingPointError):
    """Posterior mass underflowed to zero."""


class AggregationError(CTBError, ValueError):
    """Regret series with mismatched horizons were aggregated together."""


class DomainError(CTBError, ValueError):
    """A numeric argument lies outside the domain of a formula."""
