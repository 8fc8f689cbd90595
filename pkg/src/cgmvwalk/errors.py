"""Exception hierarchy shared by all modules."""


class CGMVError(Exception):
    """Base class for every error raised by the package."""


class NumericalError(CGMVError):
    """A numerical invariant failed; the message names it."""


class NotUnitary(NumericalError):
    pass


class ZeroDiagonal(NumericalError):
    pass


class NotPaperClass(NumericalError):
    pass


class ModulusOutOfRange(CGMVError, ValueError):
    pass


class AOutOfRange(ModulusOutOfRange):
    pass


class BOutOfRange(ModulusOutOfRange):
    pass


class BadModulus(ModulusOutOfRange):
    pass


class SizeTooSmall(CGMVError, ValueError):
    pass


class LengthMismatch(CGMVError, ValueError):
    pass


class TruncationTooSmall(CGMVError, ValueError):
    pass


class TruncationOverflow(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class InsideDiskViolation(CGMVError, ValueError):
    pass


class ZeroArgument(CGMVError, ValueError):
    pass


class NotNormalized(CGMVError, ValueError):
    pass


class ConfigError(CGMVError, ValueError):
    pass


class Unrealizable(CGMVError, ValueError):
    """No coin in the supported family produces the requested parameter."""
