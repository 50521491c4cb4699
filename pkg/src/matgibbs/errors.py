"""Exception hierarchy for the matgibbs package."""


class MatGibbsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidWordError(MatGibbsError):
    """A word contains a symbol outside the system's alphabet."""


class BudgetExceededError(MatGibbsError):
    """An enumeration would exceed the configured word budget."""


class NotConeNonnegativeError(MatGibbsError):
    """A matrix required to preserve the orthant has a negative entry."""


class NonSimpleDominantError(MatGibbsError):
    """Dominant eigenvalue is complex, negative, or not simple within tolerance.

    Signals that the cone hypothesis behind the requested construction fails.
    """


class NotIrreducibleError(MatGibbsError):
    """The collection (or its lift) fails the required irreducibility test."""


class InvalidExponentError(MatGibbsError):
    """Tensor-power lifts are only defined for even exponents k >= 2."""


class NotInvertibleError(MatGibbsError):
    """The transfer-operator construction requires invertible matrices."""


class DimensionBudgetError(MatGibbsError):
    """Projective grids are only supported up to dimension 8."""


class ConfigError(MatGibbsError):
    """A run configuration is malformed; the message carries the field path."""


class CheckFailedError(MatGibbsError):
    """A numerical sanity check that must hold by theory was violated."""
