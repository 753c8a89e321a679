"""Exception types shared across the package."""


class LiouvilleLabError(Exception):
    pass


class InvalidInputError(LiouvilleLabError, ValueError):
    pass


class SingularMatrixError(LiouvilleLabError, ArithmeticError):
    """Raised when a matrix is too close to singular to invert."""

    def __init__(self, message, det=None):
        super().__init__(message)
        self.det = det


class ZeroVectorError(InvalidInputError):
    pass


class DecompositionError(LiouvilleLabError, ArithmeticError):
    """Jordan-Chevalley decomposition missed its tolerance.

    The offending residuals are kept on the exception so callers can
    decide whether to retry with a looser clustering tolerance.
    """

    def __init__(self, message, residual_sum=None, residual_commute=None, residual_nilpotent=None):
        super().__init__(message)
        self.residual_sum = residual_sum
        self.residual_commute = residual_commute
        self.residual_nilpotent = residual_nilpotent
