"""Exception hierarchy shared across the toolkit."""


class RewardBoundError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RewardBoundError, ValueError):
    """An argument lies outside the documented domain (bad state, action, weight)."""


class UsageError(RewardBoundError, RuntimeError):
    """An operation was called in an invalid sequence (e.g. stepping a finished episode)."""


class ConfigurationError(RewardBoundError, ValueError):
    """A policy, config file or builder is missing a required entry."""


class CapacityError(RewardBoundError, RuntimeError):
    """An instance exceeds an explicit size cap (table capacity, enumeration cap)."""


class EstimationError(RewardBoundError, RuntimeError):
    """A prior-parameter estimate is undefined for the supplied policy."""


class StageError(RewardBoundError, RuntimeError):
    """A training stage failed its convergence check."""

    def __init__(self, message, stage_index=None, partial=None):
        super().__init__(message)
        self.stage_index = stage_index
        self.partial = partial


class NumericalError(RewardBoundError, RuntimeError):
    """A learned table picked up a non-finite value."""
