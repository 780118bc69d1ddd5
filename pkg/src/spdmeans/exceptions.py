"""Exception hierarchy shared by every module."""
import numpy as np


class SpdError(ValueError):
    """Base class for invalid inputs to means, metrics and checkers."""


class NonSquareError(SpdError):
    pass


class NotSymmetricError(SpdError):
    pass


class NotPositiveDefiniteError(SpdError):
    pass


class DimMismatchError(SpdError):
    pass


class DomainError(SpdError):
    """A scalar function is undefined somewhere on the spectrum."""


class ParameterError(SpdError):
    """A scalar parameter (p, t, alpha, grid) is outside its admissible range."""


class ZeroPError(ParameterError):
    pass


class POutOfRangeError(ParameterError):
    pass


class AlphaOutOfRangeError(ParameterError):
    pass


class GridTooSmallError(ParameterError):
    pass


class NotDensityError(SpdError):
    pass


class UnknownPropertyError(KeyError):
    pass


class ConvergenceFailure(np.linalg.LinAlgError):
    pass
