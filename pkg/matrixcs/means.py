from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np

from .tolerance import Tolerance, DEFAULT_TOL
from .errors import NotPsd, ShapeMismatch, HermitizationFailed, NotPositiveDefinite
from .linalg import (
    CMatrix,
    EigDecomp,
    spectral,
    apply_fn,
    as_square,
    frobenius,
    is_psd,
    hermitian_part,
)


@dataclass(frozen=True)
class WeightedMeanQuery:
    """
    The operands of a weighted geometric mean A #_t B

    Attributes
    ----------
    a: CMatrix
        A positive definite matrix
    b: CMatrix
        A positive definite matrix of the same size as a
    weight: float
        The weight t in [0, 1]; t = 0 yields a and t = 1 yields b
    """

    a: CMatrix
    b: CMatrix
    weight: float = 0.5

    def __post_init__(self):
        a, b = as_square(self.a), as_square(self.b)
        if a.shape != b.shape:
            raise ShapeMismatch(
                f"Geometric mean operands have shapes {a.shape} and {b.shape}"
            )
        if not 0 <= self.weight <= 1:
            raise ValueError(f"The weight must lie in [0, 1], not {self.weight}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def require_pd(A, tol: Tolerance = DEFAULT_TOL, name: str = "matrix") -> EigDecomp:
    """
    Certify that A is positive definite: lambda_min > tol.pd * lambda_max

    Returns
    -------
    EigDecomp
        The eigendecomposition of A, which callers may reuse

    Raises
    ------
    NotPositiveDefinite
        If A is singular or indefinite
    """
    dec = spectral(A, tol)
    lam = dec.eigenvalues
    if lam[-1] <= 0 or lam[-1] <= tol.pd * lam[0]:
        raise NotPositiveDefinite(
            f"The {name} is not positive definite: lambda_min = {lam[-1]:.3e}",
            lam_min=float(lam[-1]),
        )
    return dec


def weighted_geom_mean(
    q: WeightedMeanQuery, tol: Tolerance = DEFAULT_TOL, log: logging.Logger = None
) -> CMatrix:
    """
    Compute A #_t B = A^(1/2) (A^(-1/2) B A^(-1/2))^t A^(1/2)

    Parameters
    ----------
    q: WeightedMeanQuery
        The two positive definite operands and the weight t
    tol: Tolerance, optional
        The tolerances to use
    log: Logger, optional
        A logging instance for recording debug statements

    Returns
    -------
    CMatrix
        The Hermitian part of the mean

    Raises
    ------
    NotPositiveDefinite
        If either operand is not positive definite. Nothing is regularized here.
    HermitizationFailed
        If the formula strays from Hermitian by more than the tolerance allows
    """
    log = log or logging.getLogger(__name__)
    a_dec = require_pd(q.a, tol, name="first operand")
    require_pd(q.b, tol, name="second operand")
    if q.weight == 0:
        return hermitian_part(q.a)
    if q.weight == 1:
        return hermitian_part(q.b)
    a_half = a_dec.apply(np.sqrt, tol)
    a_inv_half = a_dec.apply(lambda lam: 1 / np.sqrt(lam), tol)
    middle = hermitian_part(a_inv_half @ q.b @ a_inv_half)
    weight = q.weight
    result = a_half @ apply_fn(middle, lambda lam: lam**weight, tol) @ a_half
    mean = hermitian_part(result)
    correction = frobenius(result - mean)
    if correction > tol.bound(frobenius(mean)):
        raise HermitizationFailed(
            f"The geometric mean is off Hermitian by {correction:.3e}"
        )
    log.debug(f"Hermitian correction of the geometric mean: {correction:.3e}")
    return mean


def geom_mean(
    A: CMatrix, B: CMatrix, tol: Tolerance = DEFAULT_TOL, log: logging.Logger = None
) -> CMatrix:
    """
    The geometric mean A # B of two positive definite matrices

    Examples
    --------
    >>> geom_mean(np.diag([2, 8]), np.diag([8, 2])).real
    array([[4., 0.],
           [0., 4.]])
    """
    return weighted_geom_mean(WeightedMeanQuery(A, B, 0.5), tol, log)


def gm_block(A: CMatrix, B: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """
    The PSD block [[A, A # B], [A # B, B]]

    Raises
    ------
    NotPositiveDefinite
        If either operand is not positive definite
    NotPsd
        If the assembled block fails its PSD certificate
    """
    mean = geom_mean(A, B, tol)
    block = np.block([[as_square(A), mean], [mean, as_square(B)]])
    cert = is_psd(block, tol)
    if not cert:
        raise NotPsd(
            f"The geometric mean block is not PSD: lambda_min = {cert.lam_min:.3e}",
            cert.lam_min,
        )
    return block
