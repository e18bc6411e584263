"""Exception hierarchy shared by all modules."""


class EKRError(Exception):
    pass


class NotPrimePower(EKRError, ValueError):
    pass


class TooLarge(EKRError):
    pass


class UnsupportedDegree(EKRError, ValueError):
    pass


class EqualPoints(EKRError, ValueError):
    pass


class EqualLines(EKRError, ValueError):
    pass


class GeometryViolation(EKRError, ValueError):
    pass


class TooSmallField(EKRError, ValueError):
    pass


class ResourceExceeded(EKRError):
    pass


class DimensionMismatch(EKRError, ValueError):
    pass


class NoConvergence(EKRError):
    pass


class SizeMismatch(EKRError, ValueError):
    pass


class BudgetExceeded(EKRError):
    """Search ran out of time; ``best`` holds the largest coclique found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class UnknownSuite(EKRError, ValueError):
    pass
