"""Exception hierarchy shared by all gdnc modules."""


class GdncError(Exception):
    """Base class for library errors."""


class NotPrime(GdncError, ValueError):
    pass


class NotIrreducible(GdncError, ValueError):
    pass


class OrderTooLarge(GdncError, ValueError):
    pass


class FieldMismatch(GdncError, ValueError):
    pass


class DivisionByZero(GdncError, ZeroDivisionError):
    pass


class IndexOutOfRange(GdncError, IndexError):
    pass


class NotSquare(GdncError, ValueError):
    pass


class LengthExceedsField(GdncError, ValueError):
    pass


class BadDimensions(GdncError, ValueError):
    pass


class TooManyPunctures(GdncError, ValueError):
    pass


class FieldTooSmall(GdncError, ValueError):
    pass


class ShapeMismatch(GdncError, ValueError):
    pass


class UnknownScheme(GdncError, ValueError):
    pass


class BadArguments(GdncError, ValueError):
    pass


class BudgetExceeded(GdncError, RuntimeError):
    """Raised when an exhaustive search would exceed its work budget.

    ``upper_bound`` and ``witness`` carry the best value found before the
    search was abandoned, when one is available.
    """

    def __init__(self, message, upper_bound=None, witness=None):
        super().__init__(message)
        self.upper_bound = upper_bound
        self.witness = witness


class InsufficientErrors(GdncError, ValueError):
    def __init__(self, message, failed_points=()):
        super().__init__(message)
        self.failed_points = tuple(failed_points)
