"""Exception hierarchy shared by all harmocont modules."""


class HarmocontError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HarmocontError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigurationError(HarmocontError, ValueError):
    """A case, sampling rule or config file is malformed."""


class GeometryError(HarmocontError, ValueError):
    """A point lies on or outside the source circle (or a stencil leaves it)."""


class SingularKernelError(GeometryError):
    """The logarithmic kernel was evaluated at coincident points."""


class DataError(HarmocontError, ValueError):
    """Non-finite entries in a matrix or data vector."""


class ResolutionError(HarmocontError, ValueError):
    """A grid is too coarse to represent the requested geometry."""


class PreconditionError(HarmocontError, ValueError):
    """An input violates a documented precondition."""


class EstimationError(HarmocontError, ValueError):
    """A regression or fit is degenerate."""
