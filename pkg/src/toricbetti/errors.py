"""Exception hierarchy shared by all toricbetti modules."""


class ToricBettiError(Exception):
    """Base class for every error raised by this package."""


class AmbientDimensionTooLarge(ToricBettiError):
    pass


class CoordinateOverflow(ToricBettiError):
    pass


class UnsupportedDimension(ToricBettiError):
    pass


class ParseError(ToricBettiError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeGuard(ToricBettiError):
    """A vector space or matrix is larger than the configured cap."""


class OutOfMemory(SizeGuard):
    """Fill-in during elimination exceeded the configured cap."""


class NotPrime(ToricBettiError):
    pass


class NotInX(ToricBettiError):
    pass


class WrongTSize(ToricBettiError):
    pass


class NoUniqueMaximum(ToricBettiError):
    pass


class NotInKernel(ToricBettiError):
    pass


class BadT(ToricBettiError):
    pass


class NotOneDimensional(ToricBettiError):
    pass


class NegativeUpperIndex(ToricBettiError):
    pass


class InvalidProfile(ToricBettiError):
    pass


class RegimeViolation(ToricBettiError):
    pass


class RangeViolation(ToricBettiError):
    pass


class NotNormalWarning(UserWarning):
    """Emitted (never raised) when a polytope fails the normality check."""
