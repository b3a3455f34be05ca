"""Exception hierarchy.

Every error raised on bad input derives from :class:`HsExtError`, which is a
``ValueError`` so callers that only care about "bad argument" can catch that.
"""


class HsExtError(ValueError):
    """Base class for all library errors."""


class InvalidParameterError(HsExtError):
    pass


class ResolutionError(HsExtError):
    """Sampling too coarse for the requested quadrature."""


class IncompatibleGridError(HsExtError):
    pass


class UnsupportedOrderError(HsExtError):
    pass


class DuplicateAtomError(HsExtError):
    pass


class UnsupportedAtomError(HsExtError):
    """Delta atom of a derivative order the operation cannot handle."""


class UnsupportedInputError(HsExtError):
    pass


class DomainError(HsExtError):
    pass


class DegenerateInputError(HsExtError):
    pass


class OverlapError(HsExtError):
    """Translates too short to separate the supports."""


class TailPrecisionError(HsExtError):
    pass
