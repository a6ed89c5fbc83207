"""Exception types shared across the package."""


class GkpSimError(Exception):
    """Base class for all package errors."""


class CapabilityError(GkpSimError):
    """Requested order or size exceeds what the implementation supports."""


class ConfigurationError(GkpSimError):
    """Invalid or mutually inconsistent configuration values."""


class GridOverflowError(GkpSimError):
    """State support does not fit the position grid (tail-mass guard)."""


class DegenerateStateError(GkpSimError):
    """Operation on a state with vanishing norm."""


class DegenerateConditioningError(GkpSimError):
    """Homodyne conditioning hit an outcome of (numerically) zero density."""


class MetricUndefinedError(GkpSimError):
    """Effective squeezing is undefined (no comb overlap)."""
