"""
Dense complex matrix kernels

Every spectral quantity in matrixcs flows through the cyclic Jacobi eigensolver in
:py:func:`herm_eig`. Singular values, functional calculus, and the polar parts of a
matrix are all derived from it, so numpy is only ever used for array arithmetic.
"""

from __future__ import annotations
from logging import Logger
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import numpy.typing as npt

from .tolerance import Tolerance, DEFAULT_TOL
from .errors import NotSquare, ShapeMismatch, NotHermitian, NotPsd, NoConvergence


CMatrix = npt.NDArray[np.complex128]
RVector = npt.NDArray[np.float64]
ScalarFn = Callable[[RVector], RVector]


def as_cmatrix(M) -> CMatrix:
    """
    Coerce an array-like into a two-dimensional complex matrix

    Raises
    ------
    ShapeMismatch
        If the input is not two-dimensional or has an empty dimension
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or 0 in M.shape:
        raise ShapeMismatch(f"Expected a non-empty 2D matrix but got shape {M.shape}")
    return M


def as_square(M) -> CMatrix:
    M = as_cmatrix(M)
    if M.shape[0] != M.shape[1]:
        raise NotSquare(f"Expected a square matrix but got shape {M.shape}")
    return M


def adjoint(M: CMatrix) -> CMatrix:
    return M.conj().T


def hermitian_part(M: CMatrix) -> CMatrix:
    return (M + adjoint(M)) / 2


def frobenius(M: CMatrix) -> float:
    return float(np.sqrt(np.sum(np.abs(M) ** 2)))


def is_hermitian(H: CMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    """
    Whether ||H - H*||_F is within the tolerance scaled by ||H||_F
    """
    return frobenius(H - adjoint(H)) <= tol.bound(frobenius(H))


def as_hermitian(H, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """
    Validate that H is a square Hermitian matrix and return its Hermitian part

    Raises
    ------
    NotSquare
        If H is not square
    NotHermitian
        If H deviates from its adjoint by more than the tolerance
    """
    H = as_square(H)
    if not is_hermitian(H, tol):
        raise NotHermitian(
            "Matrix is not Hermitian: ||H - H*||_F = "
            f"{frobenius(H - adjoint(H)):.3e}"
        )
    return hermitian_part(H)


def unitarity_defect(U: CMatrix) -> float:
    """
    ||U U* - I||_F, which is zero for a unitary U
    """
    U = as_square(U)
    return frobenius(U @ adjoint(U) - np.eye(U.shape[0]))


def block_diag(top: CMatrix, bottom: CMatrix) -> CMatrix:
    n, m = top.shape[0], bottom.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = top
    out[n:, n:] = bottom
    return out


@dataclass(frozen=True)
class EigDecomp:
    """
    The spectral decomposition H = U diag(lambda) U* of a Hermitian matrix

    Attributes
    ----------
    eigenvalues: RVector
        The real eigenvalues, sorted in descending order
    basis: CMatrix
        A unitary matrix whose columns are the corresponding eigenvectors
    sweeps: int
        The number of Jacobi sweeps that were needed
    """

    eigenvalues: RVector
    basis: CMatrix
    sweeps: int = field(default=0, compare=False)

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> CMatrix:
        return (self.basis * self.eigenvalues) @ adjoint(self.basis)

    def apply(self, fn: ScalarFn, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
        """
        Apply a scalar function to the decomposed matrix via functional calculus

        Eigenvalues within the tolerance below zero are clamped to zero before fn
        is applied, so that fn only ever sees the nonnegative half-line.

        Parameters
        ----------
        fn: ScalarFn
            A vectorized function of a nonnegative real array
        tol: Tolerance, optional
            The tolerance governing the clamp

        Returns
        -------
        CMatrix
            U diag(fn(lambda)) U*, made exactly Hermitian

        Raises
        ------
        NotPsd
            If an eigenvalue lies further below zero than the tolerance allows
        """
        lam = self.eigenvalues
        lam_max = float(np.max(np.abs(lam)))
        if lam[-1] < -tol.bound(lam_max):
            raise NotPsd(
                f"Cannot apply a function on [0, inf) to a matrix with eigenvalue "
                f"{lam[-1]:.3e}",
                lam_min=float(lam[-1]),
            )
        values = np.asarray(fn(np.clip(lam, 0, None)), dtype=np.float64)
        return hermitian_part((self.basis * values) @ adjoint(self.basis))


@dataclass(frozen=True)
class SvdDecomp:
    """
    A full singular value decomposition T = W diag(sigma) Z*

    Attributes
    ----------
    left: CMatrix
        The m x m unitary W
    singular_values: RVector
        The min(m, n) singular values, sorted in descending order
    right: CMatrix
        The n x n unitary Z
    """

    left: CMatrix
    singular_values: RVector
    right: CMatrix

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.singular_values))

    def reconstruct(self) -> CMatrix:
        k = len(self.singular_values)
        return (self.left[:, :k] * self.singular_values) @ adjoint(self.right[:, :k])


@dataclass(frozen=True)
class PsdCertificate:
    """
    The outcome of a positive semidefiniteness test

    Attributes
    ----------
    holds: bool
        Whether the matrix is PSD within the tolerance
    lam_min: float
        The smallest eigenvalue
    vector: CMatrix
        The unit eigenvector for lam_min, a witness of any violation
    lam_max: float
        The largest eigenvalue magnitude
    """

    holds: bool
    lam_min: float
    vector: npt.NDArray[np.complex128]
    lam_max: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class PolarParts:
    """
    The polar and Cartesian parts of a square matrix T

    Attributes
    ----------
    abs_t: CMatrix
        |T| = (T*T)^(1/2)
    abs_tstar: CMatrix
        |T*| = (TT*)^(1/2)
    re_t: CMatrix
        The real part (T + T*)/2
    im_t: CMatrix
        The imaginary part (T - T*)/2i
    abs_t_eig: EigDecomp
        The spectral decomposition of |T|, kept for further functional calculus
    abs_tstar_eig: EigDecomp
        The spectral decomposition of |T*|
    """

    abs_t: CMatrix
    abs_tstar: CMatrix
    re_t: CMatrix
    im_t: CMatrix
    abs_t_eig: EigDecomp = field(repr=False, compare=False)
    abs_tstar_eig: EigDecomp = field(repr=False, compare=False)

    def reconstruct(self) -> CMatrix:
        return self.re_t + 1j * self.im_t


def _offdiag_norm(A: CMatrix) -> float:
    off = A - np.diag(A.diagonal())
    return frobenius(off)


def _rotate(A: CMatrix, V: CMatrix, p: int, q: int):
    """
    Annihilate A[p, q] (and A[q, p]) with one complex Jacobi rotation, in place

    The rotation J has J[p,p] = c, J[p,q] = s, J[q,p] = -s e^-iφ, J[q,q] = c e^-iφ
    where e^iφ is the phase of A[p, q]. A is replaced by J* A J and V by V J.
    """
    apq = A[p, q]
    r = abs(apq)
    if r == 0:
        return
    phase = apq / r
    app, aqq = A[p, p].real, A[q, q].real
    theta = (aqq - app) / (2 * r)
    if abs(theta) > 1e150:
        t = 1 / (2 * theta)
    else:
        t = 1 / (abs(theta) + np.sqrt(theta * theta + 1))
        if theta < 0:
            t = -t
    c = 1 / np.sqrt(t * t + 1)
    s = t * c
    cphase = np.conj(phase)
    colp, colq = A[:, p].copy(), A[:, q].copy()
    A[:, p] = c * colp - s * cphase * colq
    A[:, q] = s * colp + c * cphase * colq
    rowp, rowq = A[p, :].copy(), A[q, :].copy()
    A[p, :] = c * rowp - s * phase * rowq
    A[q, :] = s * rowp + c * phase * rowq
    A[p, q] = A[q, p] = 0
    A[p, p] = app - t * r
    A[q, q] = aqq + t * r
    colp, colq = V[:, p].copy(), V[:, q].copy()
    V[:, p] = c * colp - s * cphase * colq
    V[:, q] = s * colp + c * cphase * colq


def herm_eig(H, tol: Tolerance = DEFAULT_TOL, log: Logger = None) -> EigDecomp:
    """
    Diagonalize a Hermitian matrix with the cyclic complex Jacobi method

    Sweeps over every (p, q) pair are repeated until the off-diagonal Frobenius
    mass falls below tol.offdiag * ||H||_F

    Parameters
    ----------
    H: CMatrix
        A square matrix that is Hermitian within the tolerance
    tol: Tolerance, optional
        The tolerances and sweep cap to use
    log: Logger, optional
        A logging instance for recording debug statements

    Returns
    -------
    EigDecomp
        The eigenvalues in descending order with a unitary eigenbasis

    Raises
    ------
    NotSquare
        If H is not square
    NotHermitian
        If H is not Hermitian within the tolerance
    NoConvergence
        If the sweep cap is exhausted

    Examples
    --------
    >>> herm_eig(np.array([[0, 1], [1, 0]])).eigenvalues
    array([ 1., -1.])
    """
    A = as_hermitian(H, tol).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    target = tol.offdiag * frobenius(A)
    sweeps = 0
    while _offdiag_norm(A) > target:
        if sweeps == tol.max_sweeps:
            raise NoConvergence(
                f"Jacobi did not converge within {tol.max_sweeps} sweeps: off-diagonal"
                f" mass {_offdiag_norm(A):.3e} > {target:.3e}"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(A, V, p, q)
        sweeps += 1
    if log is not None:
        log.debug(f"Jacobi converged after {sweeps} sweeps for n = {n}")
    eigenvalues = A.diagonal().real.copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return EigDecomp(eigenvalues[order], V[:, order], sweeps)


def spectral(H, tol: Tolerance = DEFAULT_TOL) -> EigDecomp:
    """
    An alias of :py:func:`herm_eig` for callers that reuse one decomposition
    across several calls to :py:meth:`EigDecomp.apply`
    """
    return herm_eig(H, tol)


def _complete_basis(Q: CMatrix, m: int) -> CMatrix:
    """
    Extend k orthonormal columns to an m x m unitary with modified Gram-Schmidt
    """
    basis = []
    candidates = [Q[:, i] for i in range(Q.shape[1])]
    candidates += list(np.eye(m, dtype=np.complex128))
    for vec in candidates:
        if len(basis) == m:
            break
        w = vec.astype(np.complex128).copy()
        norm = np.linalg.norm(w)
        # two passes keep the columns orthonormal to working precision
        for _ in range(2):
            for b in basis:
                w -= np.vdot(b, w) * b
        if np.linalg.norm(w) > 1e-8 * max(norm, 1):
            basis.append(w / np.linalg.norm(w))
    return np.column_stack(basis)


def svd(T, tol: Tolerance = DEFAULT_TOL) -> SvdDecomp:
    """
    Compute a full singular value decomposition through herm_eig

    Square Hermitian inputs are decomposed directly, since their singular values
    are the moduli of their eigenvalues. Otherwise the right singular vectors v_i
    come from herm_eig(T*T), the singular values are the norms of T v_i, and the
    left ones are T v_i / sigma_i, completed to a full basis where
    sigma_i < tol.rank * sigma_max.

    The norms of T v_i stay accurate near the null space, where the square roots
    of the eigenvalues of T*T would only be accurate to about sqrt(eps) sigma_max.

    Parameters
    ----------
    T: CMatrix
        Any m x n matrix
    tol: Tolerance, optional
        The tolerances to use

    Returns
    -------
    SvdDecomp
        The left unitary, the descending singular values, and the right unitary
    """
    T = as_cmatrix(T)
    m, n = T.shape
    k = min(m, n)
    if m == n and is_hermitian(T, tol):
        dec = herm_eig(T, tol)
        lam = dec.eigenvalues
        order = np.argsort(-np.abs(lam), kind="stable")
        right = dec.basis[:, order]
        signs = np.where(lam[order] < 0, -1.0, 1.0)
        sigma = np.abs(lam[order])
        sigma = np.where(sigma > tol.rank * sigma[0], sigma, 0.0)
        return SvdDecomp(right * signs, sigma, right)
    basis = herm_eig(adjoint(T) @ T, tol).basis
    images = T @ basis[:, :k]
    sigma = np.linalg.norm(images, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, images = sigma[order], images[:, order]
    right = np.column_stack((basis[:, :k][:, order], basis[:, k:]))
    cutoff = tol.rank * sigma[0]
    cols = [images[:, i] / sigma[i] for i in range(k) if sigma[i] > cutoff]
    sigma = np.where(sigma > cutoff, sigma, 0.0)
    Q = np.column_stack(cols) if cols else np.zeros((m, 0), dtype=np.complex128)
    return SvdDecomp(_complete_basis(Q, m), sigma, right)


def singular_values(T, tol: Tolerance = DEFAULT_TOL) -> RVector:
    return svd(T, tol).singular_values


def apply_fn(A, fn: ScalarFn, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """
    Apply a scalar function to a PSD matrix: U diag(fn(lambda_i)) U*

    Parameters
    ----------
    A: CMatrix
        A positive semidefinite matrix
    fn: ScalarFn
        A vectorized function defined on [0, lambda_max]
    tol: Tolerance, optional
        The tolerances to use

    Raises
    ------
    NotPsd
        If A has an eigenvalue below -tol

    Examples
    --------
    >>> apply_fn(np.diag([0, 1, 4]), np.sqrt).real
    array([[0., 0., 0.],
           [0., 1., 0.],
           [0., 0., 2.]])
    """
    return herm_eig(A, tol).apply(fn, tol)


def abs_decomp(T, tol: Tolerance = DEFAULT_TOL) -> EigDecomp:
    """
    The spectral decomposition of |T| = (T*T)^(1/2)
    """
    T = as_square(T)
    if is_hermitian(T, tol):
        dec = herm_eig(T, tol)
        lam = np.abs(dec.eigenvalues)
        order = np.argsort(-lam, kind="stable")
        return EigDecomp(lam[order], dec.basis[:, order], dec.sweeps)
    dec = herm_eig(adjoint(T) @ T, tol)
    lam = dec.eigenvalues
    if lam[-1] < -tol.bound(lam[0]):
        raise NotPsd("T*T is not PSD", lam_min=float(lam[-1]))
    return EigDecomp(np.sqrt(np.clip(lam, 0, None)), dec.basis, dec.sweeps)


def abs_matrix(T, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """
    The absolute value |T| = (T*T)^(1/2)
    """
    return hermitian_part(abs_decomp(T, tol).reconstruct())


def polar_parts(T, tol: Tolerance = DEFAULT_TOL) -> PolarParts:
    """
    Compute |T|, |T*|, Re T, and Im T for a square matrix

    Parameters
    ----------
    T: CMatrix
        A square matrix
    tol: Tolerance, optional
        The tolerances to use

    Returns
    -------
    PolarParts
        The four parts, along with the eigendecompositions of |T| and |T*|
    """
    T = as_square(T)
    t_eig = abs_decomp(T, tol)
    tstar_eig = abs_decomp(adjoint(T), tol)
    return PolarParts(
        abs_t=hermitian_part(t_eig.reconstruct()),
        abs_tstar=hermitian_part(tstar_eig.reconstruct()),
        re_t=hermitian_part(T),
        im_t=(T - adjoint(T)) / 2j,
        abs_t_eig=t_eig,
        abs_tstar_eig=tstar_eig,
    )


def is_psd(H, tol: Tolerance = DEFAULT_TOL) -> PsdCertificate:
    """
    Certify whether a Hermitian matrix is positive semidefinite

    H passes when lambda_min(H) >= -(atol + rtol * max(1, lambda_max(|H|)))

    Parameters
    ----------
    H: CMatrix
        A square Hermitian matrix
    tol: Tolerance, optional
        The tolerances to use

    Returns
    -------
    PsdCertificate
        Truthy iff H is PSD; carries lambda_min and its eigenvector as a witness

    Raises
    ------
    NotHermitian
        If H is not Hermitian within the tolerance
    """
    dec = herm_eig(H, tol)
    lam_min = float(dec.eigenvalues[-1])
    lam_max = float(np.max(np.abs(dec.eigenvalues)))
    return PsdCertificate(
        holds=lam_min >= -tol.bound(lam_max),
        lam_min=lam_min,
        vector=dec.basis[:, -1],
        lam_max=lam_max,
    )


def lambda_min(H, tol: Tolerance = DEFAULT_TOL) -> float:
    return float(herm_eig(H, tol).eigenvalues[-1])


def loewner_leq(A, B, tol: Tolerance = DEFAULT_TOL) -> PsdCertificate:
    """
    Test the Loewner order A <= B, that is B - A >= O

    Raises
    ------
    ShapeMismatch
        If A and B have different shapes
    NotHermitian
        If either matrix is not Hermitian within the tolerance
    """
    A, B = as_hermitian(A, tol), as_hermitian(B, tol)
    if A.shape != B.shape:
        raise ShapeMismatch(f"Cannot compare shapes {A.shape} and {B.shape}")
    return is_psd(B - A, tol)

