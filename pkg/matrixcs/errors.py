"""
Exceptions raised by the matrixcs solvers and constructors

Every exception derives from :py:class:`MatrixError`, which is a ValueError. The
iterative solvers additionally raise subclasses of numpy's LinAlgError.
"""

from __future__ import annotations

from numpy.linalg import LinAlgError


class MatrixError(ValueError):
    """
    Base class for every failure raised by matrixcs
    """

    pass


class NotSquare(MatrixError):
    pass


class ShapeMismatch(MatrixError):
    pass


class NotHermitian(MatrixError):
    pass


class _SpectrumError(MatrixError):
    """
    A failure caused by the spectrum of an input

    Attributes
    ----------
    lam_min: float
        The smallest eigenvalue of the offending matrix, if it is known
    """

    def __init__(self, message: str, lam_min: float = None):
        super().__init__(message)
        self.lam_min = lam_min


class NotPsd(_SpectrumError):
    pass


class NotPositiveDefinite(_SpectrumError):
    pass


class NoConvergence(MatrixError, LinAlgError):
    pass


class HermitizationFailed(MatrixError, LinAlgError):
    pass


class RootFindingFailed(MatrixError, LinAlgError):
    pass


class TooLargeForPermanent(MatrixError):
    pass


class SimilarityMismatch(MatrixError):
    pass


class OffDiagonalMismatch(MatrixError):
    pass
