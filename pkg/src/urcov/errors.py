"""Exception types raised by the numeric kernels."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class RangeError(ValueError):
    """Requested value lies outside the attainable range of a bound."""


class ConvergenceError(ArithmeticError):
    """A series or iteration hit its work limit before reaching tolerance."""


class UnsupportedKindError(ValueError):
    """The requested bound kind has no formula for this quantity."""
