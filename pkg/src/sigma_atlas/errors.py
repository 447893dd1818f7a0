"""Exception types shared across the package.

Every error raised on a contract violation is a subclass of AtlasError so
callers (and the CLI) can distinguish misuse from genuine bugs.
"""


class AtlasError(Exception):
    """Base class for all package-specific errors."""


class NoNormalization(AtlasError):
    """Coefficient set cannot be normalized (empty, or equal to {0})."""


class SingletonSet(AtlasError):
    """Operation needs at least two distinct elements."""


class PreconditionViolated(AtlasError):
    """An operation's stated precondition does not hold."""


class DegenerateDenominator(AtlasError):
    """A threshold formula's denominator vanishes at these parameters."""


class BudgetExceeded(AtlasError):
    """An enumeration would exceed the configured work budget."""


class RootFindingFailure(AtlasError):
    """The iterative root finder failed to converge for a polynomial."""


class EmptyRootSet(AtlasError):
    """A statistic was requested over an empty collection of roots."""


class SpecMismatch(AtlasError):
    """Two rasters with different geometry/config cannot be combined."""


class GreedyFailed(AtlasError):
    """A greedy witness left its certified interval (indicates a bug)."""
