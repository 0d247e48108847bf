"""
2 x 2 block matrices [[A, C*], [C, B]] and their unitary decompositions
"""

from __future__ import annotations
import logging
from functools import cached_property
from dataclasses import dataclass, field

import numpy as np

from .lieb import FactorPair
from .means import geom_mean
from .tolerance import Tolerance, DEFAULT_TOL
from .errors import NotPsd, ShapeMismatch, SimilarityMismatch, OffDiagonalMismatch
from .linalg import (
    CMatrix,
    EigDecomp,
    PolarParts,
    PsdCertificate,
    svd,
    is_psd,
    adjoint,
    herm_eig,
    as_square,
    as_cmatrix,
    frobenius,
    block_diag,
    polar_parts,
    hermitian_part,
)


@dataclass(frozen=True)
class Block2x2:
    """
    The block matrix [[A, C*], [C, B]]

    Attributes
    ----------
    a: CMatrix
        The n x n top-left block
    c: CMatrix
        The m x n bottom-left block
    b: CMatrix
        The m x m bottom-right block
    """

    a: CMatrix
    c: CMatrix
    b: CMatrix

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @cached_property
    def assembled(self) -> CMatrix:
        return np.block([[self.a, adjoint(self.c)], [self.c, self.b]])

    @classmethod
    def from_matrix(cls, M, n: int) -> Block2x2:
        """
        Split a square matrix into blocks with an n x n top-left corner

        Raises
        ------
        ShapeMismatch
            If n does not leave a non-empty bottom-right corner
        """
        M = as_square(M)
        if not 0 < n < M.shape[0]:
            raise ShapeMismatch(f"Cannot split a {M.shape} matrix at n = {n}")
        return make_block(M[:n, :n], M[n:, :n], M[n:, n:])

    def flipped(self) -> Block2x2:
        """
        The block [[B, C], [C*, A]], which is PSD whenever this one is
        """
        return make_block(self.b, adjoint(self.c), self.a)

    def off_diagonal(self) -> CMatrix:
        """
        The matrix [[O, C*], [C, O]]
        """
        return np.block(
            [
                [np.zeros_like(self.a), adjoint(self.c)],
                [self.c, np.zeros_like(self.b)],
            ]
        )

    def __add__(self, other: Block2x2) -> Block2x2:
        return make_block(self.a + other.a, self.c + other.c, self.b + other.b)

    def certify(self, tol: Tolerance = DEFAULT_TOL) -> PsdCertificate:
        return is_psd(self.assembled, tol)


def make_block(A, C, B) -> Block2x2:
    """
    Assemble [[A, C*], [C, B]] without assuming positivity

    Parameters
    ----------
    A: CMatrix
        An n x n matrix
    C: CMatrix
        An m x n matrix
    B: CMatrix
        An m x m matrix

    Raises
    ------
    ShapeMismatch
        If the shapes are incompatible
    """
    A, B, C = as_square(A), as_square(B), as_cmatrix(C)
    if C.shape != (B.shape[0], A.shape[0]):
        raise ShapeMismatch(
            f"The off-diagonal block must be {B.shape[0]}x{A.shape[0]}, not {C.shape}"
        )
    return Block2x2(A, C, B)


def _certified(block: Block2x2, tol: Tolerance, what: str) -> Block2x2:
    cert = block.certify(tol)
    if not cert:
        raise NotPsd(
            f"The {what} is not PSD: lambda_min = {cert.lam_min:.3e}", cert.lam_min
        )
    return block


def lemma03_block(
    T,
    p: FactorPair,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    certify: bool = True,
) -> Block2x2:
    """
    The PSD block [[g^2(|T|), T*], [T, h^2(|T*|)]] of a square matrix T

    With the sqrt pair this is [[|T|, T*], [T, |T*|]].

    Parameters
    ----------
    T: CMatrix
        A square matrix
    p: FactorPair
        The factors (g, h) with g(t) h(t) = t
    tol: Tolerance, optional
        The tolerances to use
    parts: PolarParts, optional
        The polar parts of T, if they have already been computed
    certify: bool, optional
        Whether to verify that the block is PSD

    Raises
    ------
    NotPsd
        If certify is True and the block fails the PSD test
    """
    T = as_square(T)
    parts = parts or polar_parts(T, tol)
    top, _ = p.squares(parts.abs_t_eig, tol)
    _, bottom = p.squares(parts.abs_tstar_eig, tol)
    block = make_block(top, T, bottom)
    return _certified(block, tol, "factor pair block") if certify else block


@dataclass(frozen=True)
class PinchDecomp:
    """
    Unitaries u and v with M = u diag(top, O) u* + v diag(O, bottom) v*

    Attributes
    ----------
    u: CMatrix
        A unitary of the same size as the source block
    v: CMatrix
        A unitary of the same size as the source block
    top: CMatrix
        The top-left block A
    bottom: CMatrix
        The bottom-right block B
    source: CMatrix
        The assembled block that was decomposed
    """

    u: CMatrix
    v: CMatrix
    top: CMatrix
    bottom: CMatrix
    source: CMatrix = field(repr=False)

    def reconstruct(self) -> CMatrix:
        zero_top = np.zeros_like(self.top)
        zero_bottom = np.zeros_like(self.bottom)
        return self.u @ block_diag(self.top, zero_bottom) @ adjoint(
            self.u
        ) + self.v @ block_diag(zero_top, self.bottom) @ adjoint(self.v)

    def residual(self) -> float:
        return frobenius(self.reconstruct() - self.source)


def _conjugator(X: CMatrix, tol: Tolerance) -> CMatrix:
    # X = W S Z* gives X*X = (Z W*) XX* (Z W*)*
    dec = svd(X, tol)
    return dec.right @ adjoint(dec.left)


def pinch_decompose(
    M: Block2x2, tol: Tolerance = DEFAULT_TOL, log: logging.Logger = None
) -> PinchDecomp:
    """
    Write a PSD block as u diag(A, O) u* + v diag(O, B) v*

    With R = M^(1/2) and the coordinate projections P1, P2, the matrix X1 = P1 R
    satisfies X1*X1 = R P1 R and X1 X1* = diag(A, O). A full SVD X1 = W S Z* then
    gives u = Z W*, and likewise v comes from X2 = P2 R. Since M = R P1 R + R P2 R,
    the two pieces sum to M.

    Parameters
    ----------
    M: Block2x2
        A PSD block matrix
    tol: Tolerance, optional
        The tolerances to use
    log: Logger, optional
        A logging instance for recording debug statements

    Returns
    -------
    PinchDecomp
        The two unitaries, the diagonal blocks, and the source matrix

    Raises
    ------
    NotPsd
        If M is not PSD
    """
    log = log or logging.getLogger(__name__)
    source = M.assembled
    R = herm_eig(source, tol).apply(np.sqrt, tol)
    X1, X2 = R.copy(), R.copy()
    X1[M.n :, :] = 0
    X2[: M.n, :] = 0
    pinch = PinchDecomp(
        u=_conjugator(X1, tol),
        v=_conjugator(X2, tol),
        top=M.a,
        bottom=M.b,
        source=source,
    )
    log.debug(f"Pinched a block of size {M.n}+{M.m}, residual {pinch.residual():.3e}")
    return pinch


def _rotation(n: int) -> CMatrix:
    # the self-adjoint unitary (1/sqrt 2) [[I, I], [I, -I]]
    eye = np.eye(n)
    return np.block([[eye, eye], [eye, -eye]]) / np.sqrt(2)


def _pair_mean(T: CMatrix, p: FactorPair, tol: Tolerance) -> CMatrix:
    # (g^2(|T|) + h^2(|T*|))/2 from the SVD T = W S Z*, where |T| = Z S Z* and
    # |T*| = W S W*, independently of the polar parts behind the block
    dec = svd(T, tol)
    sigma = dec.singular_values
    g2, _ = p.squares(EigDecomp(sigma, dec.right), tol)
    _, h2 = p.squares(EigDecomp(sigma, dec.left), tol)
    return (g2 + h2) / 2


def _assert_similar(X: CMatrix, Y: CMatrix, tol: Tolerance, what: str):
    lam_x = herm_eig(X, tol).eigenvalues
    lam_y = herm_eig(Y, tol).eigenvalues
    gap = float(np.max(np.abs(lam_x - lam_y)))
    if gap > tol.bound(float(np.max(np.abs(lam_y)))):
        raise SimilarityMismatch(f"The {what} block spectrum is off by {gap:.3e}")


def remark13_decompose(
    T,
    p: FactorPair,
    tol: Tolerance = DEFAULT_TOL,
    log: logging.Logger = None,
) -> PinchDecomp:
    """
    Decompose the factor pair block of T into pieces built from S + Re T and
    S - Re T, where S = (g^2(|T|) + h^2(|T*|))/2

    The block M = [[g^2(|T|), T*], [T, h^2(|T*|)]] is conjugated by the
    self-adjoint unitary J = (1/sqrt 2) [[I, I], [I, -I]], whose diagonal blocks
    are S + Re T and S - Re T. Pinching JMJ and multiplying its unitaries by J
    yields u and v with M = u diag(S + Re T, O) u* + v diag(O, S - Re T) v*.

    Parameters
    ----------
    T: CMatrix
        A square matrix
    p: FactorPair
        The factors (g, h)
    tol: Tolerance, optional
        The tolerances to use
    log: Logger, optional
        A logging instance for recording debug statements

    Returns
    -------
    PinchDecomp
        A decomposition whose source is M, with top = S + Re T and
        bottom = S - Re T

    Raises
    ------
    SimilarityMismatch
        If the recovered blocks do not have the spectra of S + Re T and S - Re T
    """
    T = as_square(T)
    n = T.shape[0]
    parts = polar_parts(T, tol)
    block = lemma03_block(T, p, tol, parts=parts)
    J = _rotation(n)
    rotated = Block2x2.from_matrix(J @ block.assembled @ J, n)
    pinch = pinch_decompose(rotated, tol, log)
    S = _pair_mean(T, p, tol)
    re_t = hermitian_part(T)
    _assert_similar(pinch.top, S + re_t, tol, "top")
    _assert_similar(pinch.bottom, S - re_t, tol, "bottom")
    return PinchDecomp(
        u=J @ pinch.u,
        v=J @ pinch.v,
        top=pinch.top,
        bottom=pinch.bottom,
        source=block.assembled,
    )


def gm_block_merge(
    b1: Block2x2, b2: Block2x2, tol: Tolerance = DEFAULT_TOL, certify: bool = True
) -> Block2x2:
    """
    Merge two PSD blocks that share C into [[A1 # A2, C*], [C, B1 # B2]]

    Parameters
    ----------
    b1: Block2x2
        A PSD block with positive definite diagonal blocks
    b2: Block2x2
        Another such block with the same off-diagonal
    tol: Tolerance, optional
        The tolerances to use
    certify: bool, optional
        Whether to verify that the merged block is PSD

    Raises
    ------
    OffDiagonalMismatch
        If the blocks do not share the same off-diagonal C
    NotPositiveDefinite
        If a diagonal block is not positive definite
    NotPsd
        If certify is True and the merged block fails the PSD test
    """
    if b1.c.shape != b2.c.shape or frobenius(b1.c - b2.c) > tol.bound(
        frobenius(b1.c)
    ):
        raise OffDiagonalMismatch("The blocks do not share the same off-diagonal")
    merged = make_block(geom_mean(b1.a, b2.a, tol), b1.c, geom_mean(b1.b, b2.b, tol))
    if not certify:
        return merged
    return _certified(merged, tol, "merged geometric mean block")
