"""Exception hierarchy shared by every module."""


class PseudolatticeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(PseudolatticeError, ValueError):
    pass


class NotSquare(PseudolatticeError, ValueError):
    pass


class Singular(PseudolatticeError, ValueError):
    pass


class NotSymmetric(PseudolatticeError, ValueError):
    pass


class NotExceptional(PseudolatticeError, ValueError):
    pass


class IndexOutOfRange(PseudolatticeError, IndexError):
    pass


class NotABasis(PseudolatticeError, ValueError):
    pass


class ZeroVector(PseudolatticeError, ValueError):
    pass


class NotPointLike(PseudolatticeError, ValueError):
    pass


class SearchExhausted(PseudolatticeError, RuntimeError):
    """A budgeted search ran out of nodes (or height) before succeeding."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class Inconsistent(PseudolatticeError, ValueError):
    pass


class Underdetermined(PseudolatticeError, ValueError):
    pass


class NotSpherical(PseudolatticeError, ValueError):
    pass


class TargetMismatch(PseudolatticeError, ValueError):
    pass


class NotOddCY(PseudolatticeError, ValueError):
    pass


class NormMismatch(PseudolatticeError, ValueError):
    pass


class NotPrimitive(PseudolatticeError, ValueError):
    pass


class NotQdp(PseudolatticeError, ValueError):
    pass


class NotASolution(PseudolatticeError, ValueError):
    pass


class DescentStuck(PseudolatticeError, RuntimeError):
    pass


class UnexpectedCokernel(PseudolatticeError, RuntimeError):
    pass


class NotSL2(PseudolatticeError, ValueError):
    pass


class NotParabolic(PseudolatticeError, ValueError):
    pass


class NotQuasiLG(PseudolatticeError, ValueError):
    pass


class ReplayMismatch(PseudolatticeError, AssertionError):
    """A witness failed to reproduce its claimed result. Always a bug."""


class RankTooSmall(PseudolatticeError, ValueError):
    pass
