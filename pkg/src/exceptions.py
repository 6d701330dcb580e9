class ModifiedNewtonError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(ModifiedNewtonError, ValueError):
    pass


class AsymmetricMatrixError(ModifiedNewtonError, ValueError):
    pass


class NotPositiveDefiniteError(ModifiedNewtonError, ArithmeticError):
    """Raised by the Cholesky factorization when a pivot falls below tolerance.

    The solver treats this as a signal that the eigenvalue estimates used to
    build B_k were wrong, not as a fatal error.
    """


class NotConvergedError(ModifiedNewtonError, ArithmeticError):
    def __init__(self, message: str, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DegenerateStepError(ModifiedNewtonError, ArithmeticError):
    pass


class NotUnitVectorError(ModifiedNewtonError, ValueError):
    pass


class NotDescentError(ModifiedNewtonError, ValueError):
    pass


class ZeroVectorError(ModifiedNewtonError, ValueError):
    pass


class EvaluationFailureError(ModifiedNewtonError, ArithmeticError):
    pass


class MatrixFormatError(ModifiedNewtonError, ValueError):
    pass


class UnknownProblemError(ModifiedNewtonError, KeyError):
    def __str__(self):
        # KeyError quotes its argument; keep the plain message
        return str(self.args[0]) if self.args else ''
