"""Exception hierarchy shared by all modules."""


class RankDistortionError(Exception):
    """Base class for every error raised by this package."""


class InvalidCount(RankDistortionError, ValueError):
    pass


class InvalidRange(RankDistortionError, ValueError):
    pass


class InvalidConfig(RankDistortionError, ValueError):
    pass


class RankDeficient(RankDistortionError, ValueError):
    pass


class ParseError(RankDistortionError, ValueError):
    pass


class IoError(RankDistortionError, OSError):
    pass


class IndexOutOfRange(RankDistortionError, IndexError):
    pass


class SameIndex(RankDistortionError, ValueError):
    pass


class DomainError(RankDistortionError, ValueError):
    pass


class TieDetected(RankDistortionError):
    """Two residuals coincide almost surely; exact formulas do not apply."""


class DegenerateDenominator(RankDistortionError):
    pass


class InterceptMissing(RankDistortionError):
    """The column space does not contain the constant vector."""


class InterceptMissingWarning(UserWarning):
    pass
