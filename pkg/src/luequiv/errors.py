"""Exception types raised by luequiv."""


class LUError(Exception):
    """Base class for all luequiv errors."""


class DimensionMismatch(LUError, ValueError):
    pass


class NonFiniteEntries(LUError, ValueError):
    pass


class NotHermitian(LUError, ValueError):
    pass


class NotPositive(LUError, ValueError):
    """Raised when a candidate density matrix has a negative eigenvalue."""

    def __init__(self, min_eigenvalue, threshold):
        self.min_eigenvalue = float(min_eigenvalue)
        self.threshold = float(threshold)
        super().__init__(
            f"matrix is not positive semidefinite: min eigenvalue "
            f"{self.min_eigenvalue:.3e} < -{self.threshold:.3e}"
        )


class ZeroTrace(LUError, ValueError):
    pass


class LengthMismatch(LUError, ValueError):
    pass


class NotUnitary(LUError, ValueError):
    pass


class NonPositiveParameter(LUError, ValueError):
    pass


class EigSolverFailure(LUError, ArithmeticError):
    pass


class SvdFailure(LUError, ArithmeticError):
    pass


class RankDeficient(LUError, ArithmeticError):
    pass


class DegenerateSingularValue(LUError, ArithmeticError):
    """Top singular value is not simple, so it has no derivative."""

    def __init__(self, gap):
        self.gap = float(gap)
        super().__init__(f"top singular value gap {self.gap:.3e} below threshold")
