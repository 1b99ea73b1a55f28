"""Exception types raised across the package."""


class MubcohError(ValueError):
    """Base class for all errors raised by :mod:`mubcoh`."""


class NotHermitian(MubcohError):
    pass


class DegenerateDimension(MubcohError):
    pass


class DomainError(MubcohError):
    pass


class BadDimension(MubcohError):
    pass


class BadRank(MubcohError):
    pass


class UnsupportedDimension(MubcohError):
    pass


class DimensionMismatch(MubcohError):
    pass


class ParseError(MubcohError):
    pass


class NotUnbiased(MubcohError):
    pass


class NegativeRadicand(MubcohError):
    pass


class BadIndex(MubcohError):
    pass


class InvalidState(MubcohError):
    pass
