"""Exception types shared across the package."""


class WanderingError(Exception):
    """Base class for errors raised by this package."""


class ArgumentError(WanderingError, ValueError):
    """Raised when an argument is invalid (empty generator list, zero polynomial, ...)."""


class GridMismatchError(WanderingError, ValueError):
    """Raised when two objects live on different truncation grids."""


class IndexRangeError(WanderingError, IndexError):
    """Raised when a multi-index lies outside a truncation grid."""


class ConfigurationError(WanderingError, ValueError):
    """Raised when margins, depths or caps leave nothing to check.

    All passed arguments are individually valid, but their combination
    leaves an empty interior or asks for more exactness than the grid has.
    """


class NotApplicableError(WanderingError, ValueError):
    """Raised when a check needs more variables than the model has."""
