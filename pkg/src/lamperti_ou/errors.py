"""Exception types raised by the library."""


class LampertiError(Exception):
    """Base class for all library errors."""


class RejectsModel(LampertiError, ValueError):
    """The Lévy model does not drift to +infinity or has invalid parameters."""


class Unavailable(LampertiError):
    """A closed form (Laplace exponent, moment oracle) does not exist for the model."""


class WrongFamily(LampertiError, ValueError):
    """Operation requested on a model family it does not support."""


class TableTooLarge(LampertiError):
    """A grid would exceed the configured maximum table size."""


class ExponentOverflow(LampertiError, OverflowError):
    """A value needed in linear scale is outside the double-precision range."""


class OutOfRange(LampertiError):
    """Evaluation point lies beyond the simulated horizon of a path."""


class NoConvergence(LampertiError):
    """An adaptive integration hit its horizon cap before meeting the tolerance."""


class DegenerateModel(LampertiError, ValueError):
    """The model is a pure drift, for which the requested object is not defined."""


class DomainRestricted(LampertiError, ValueError):
    """Argument lies in a branch the library does not represent."""


class InvalidTarget(LampertiError, ValueError):
    """Recurrence target outside the interior of the support interval."""


class ConfigError(LampertiError, ValueError):
    """Malformed or incomplete run configuration."""
