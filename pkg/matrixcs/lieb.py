"""
Lieb functionals, unitarily invariant norms, and factor pairs

A Lieb functional f is monotone on the PSD cone and satisfies
|f(A*B)|^2 <= f(A*A) f(B*B). The canonical members implemented here are the
determinant, the permanent, the spectral radius, the elementary symmetric
functions of the eigenvalues, and every unitarily invariant norm.
"""

from __future__ import annotations
import re
import logging
from itertools import product
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np
import numpy.typing as npt

from .data import CheckOutcome
from .tolerance import Tolerance, DEFAULT_TOL
from .ensembles import Ensemble, draw, rng_for
from .errors import MatrixError, TooLargeForPermanent, RootFindingFailed
from .linalg import (
    CMatrix,
    RVector,
    ScalarFn,
    EigDecomp,
    adjoint,
    herm_eig,
    spectral,
    as_square,
    is_hermitian,
    singular_values,
)


MAX_PERMANENT_DIM = 12


def determinant(M) -> complex:
    """
    The determinant, by LU factorization with partial pivoting

    Examples
    --------
    >>> determinant(np.eye(3))
    (1+0j)
    """
    A = as_square(M).copy()
    n = A.shape[0]
    det = 1 + 0j
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(A[k:, k])))
        if A[pivot, k] == 0:
            return 0j
        if pivot != k:
            A[[k, pivot]] = A[[pivot, k]]
            det = -det
        det *= A[k, k]
        A[k + 1 :, k:] -= np.outer(A[k + 1 :, k] / A[k, k], A[k, k:])
    return complex(det)


def permanent(M) -> complex:
    """
    The permanent, by Ryser's formula with subsets visited in Gray-code order

    Each step adds or removes one column from the running row sums, so the cost
    is O(2^n n).

    Raises
    ------
    TooLargeForPermanent
        If the matrix is larger than 12 x 12

    Examples
    --------
    >>> permanent(np.ones((3, 3)))
    (6+0j)
    """
    A = as_square(M)
    n = A.shape[0]
    if n > MAX_PERMANENT_DIM:
        raise TooLargeForPermanent(
            f"Refusing to compute the permanent of a {n}x{n} matrix; the limit is "
            f"{MAX_PERMANENT_DIM}"
        )
    row_sums = np.zeros(n, dtype=np.complex128)
    chosen = np.zeros(n, dtype=bool)
    total = 0j
    for k in range(1, 2**n):
        # the column that flips between consecutive Gray codes
        col = (k & -k).bit_length() - 1
        if chosen[col]:
            row_sums -= A[:, col]
        else:
            row_sums += A[:, col]
        chosen[col] = not chosen[col]
        sign = -1 if np.count_nonzero(chosen) % 2 else 1
        total += sign * np.prod(row_sums)
    return complex((-1) ** n * total)


def char_poly(M) -> npt.NDArray[np.complex128]:
    """
    The characteristic polynomial det(xI - M) by the Faddeev-LeVerrier recursion

    Returns
    -------
    npt.NDArray[np.complex128]
        The n + 1 monic coefficients, from the leading one down to the constant
    """
    A = as_square(M)
    n = A.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    coeffs = [1 + 0j]
    aux = np.zeros_like(A)
    for k in range(1, n + 1):
        aux = A @ aux + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ aux) / k)
    return np.array(coeffs, dtype=np.complex128)


def poly_roots(
    coeffs, tol: Tolerance = DEFAULT_TOL, log: logging.Logger = None
) -> npt.NDArray[np.complex128]:
    """
    Find every root of a polynomial at once with the Aberth-Ehrlich iteration

    The starting points are spread over a circle with the Cauchy bound as radius,
    rotated off the real axis so that real polynomials do not start on a line of
    symmetry.

    Parameters
    ----------
    coeffs: array-like
        The coefficients, from the leading one down to the constant
    tol: Tolerance, optional
        Provides the zero threshold, the relative step size at convergence, and
        the iteration cap, which grows with the degree
    log: Logger, optional
        A logging instance for recording debug statements

    Returns
    -------
    npt.NDArray[np.complex128]
        The roots, in no particular order

    Raises
    ------
    RootFindingFailed
        If the iteration cap is exhausted
    """
    log = log or logging.getLogger(__name__)
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=np.complex128), "f")
    if len(coeffs) == 0:
        raise MatrixError("The zero polynomial has no well-defined roots")
    coeffs = coeffs / coeffs[0]
    # trailing (near) zero coefficients are roots at zero, where Aberth-Ehrlich
    # only converges linearly
    tiny = np.abs(coeffs) <= tol.atol * np.max(np.abs(coeffs))
    zeros = 0
    while zeros < len(coeffs) - 1 and tiny[len(coeffs) - 1 - zeros]:
        zeros += 1
    if zeros:
        log.debug(f"Deflating {zeros} roots at zero")
        coeffs = coeffs[: len(coeffs) - zeros]
    found = np.zeros(zeros, dtype=np.complex128)
    degree = len(coeffs) - 1
    if degree == 0:
        return found
    deriv = coeffs[:-1] * np.arange(degree, 0, -1)
    radius = 1 + np.max(np.abs(coeffs[1:]))
    angles = 2 * np.pi * np.arange(degree) / degree + 0.4
    roots = radius * np.exp(1j * angles)
    # clustered roots converge linearly, more slowly the larger the cluster
    max_iter = tol.max_root_iter * -(-degree // 8)
    for iteration in range(max_iter):
        ratio = np.polyval(coeffs, roots) / np.polyval(deriv, roots)
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = np.sum(1 / diff, axis=1)
        step = ratio / (1 - ratio * repulsion)
        step[~np.isfinite(step)] = 0
        roots = roots - step
        if np.all(np.abs(step) <= tol.root_step * np.maximum(1, np.abs(roots))):
            log.debug(f"Aberth-Ehrlich converged after {iteration + 1} iterations")
            return np.concatenate((roots, found))
    raise RootFindingFailed(
        f"Aberth-Ehrlich did not converge within {max_iter} iterations"
    )


def elementary_symmetric(values, k: int) -> complex:
    """
    e_k of a sequence of numbers, by the usual product expansion recurrence
    """
    e = np.zeros(k + 1, dtype=np.complex128)
    e[0] = 1
    for value in values:
        e[1:] = e[1:] + value * e[:-1]
    return complex(e[k])


@dataclass(frozen=True)
class NormKind:
    """
    A unitarily invariant norm, given as a symmetric gauge function of the
    singular values

    Attributes
    ----------
    kind: str
        One of operator, trace, frobenius, schatten, or kyfan
    param: float, optional
        The exponent p >= 1 of a Schatten norm or the order k >= 1 of a Ky Fan norm
    """

    kind: str
    param: float = None

    KINDS: ClassVar[tuple] = ("operator", "trace", "frobenius", "schatten", "kyfan")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"Unknown norm '{self.kind}'")
        if self.kind == "schatten" and (self.param is None or self.param < 1):
            raise ValueError("Schatten norms need an exponent p >= 1")
        if self.kind == "kyfan" and (
            self.param is None or self.param < 1 or int(self.param) != self.param
        ):
            raise ValueError("Ky Fan norms need an integer order k >= 1")

    def __str__(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}{self.param:g}"

    @classmethod
    def from_name(cls, name: str) -> NormKind:
        """
        Parse a norm name like "operator", "trace", "frobenius", "kyfan2", or
        "schatten3"
        """
        match = re.fullmatch(r"(kyfan|schatten)([0-9.]+)", name)
        if match:
            kind, param = match.groups()
            return cls(kind, int(param) if kind == "kyfan" else float(param))
        return cls(name)

    def gauge(self, sigma: RVector) -> float:
        sigma = np.sort(np.abs(np.asarray(sigma, dtype=np.float64)))[::-1]
        if self.kind == "operator":
            return float(sigma[0])
        if self.kind == "trace":
            return float(np.sum(sigma))
        if self.kind == "frobenius":
            return float(np.sqrt(np.sum(sigma**2)))
        if self.kind == "kyfan":
            return float(np.sum(sigma[: int(self.param)]))
        return float(np.sum(sigma**self.param) ** (1 / self.param))

    def __call__(self, M, tol: Tolerance = DEFAULT_TOL) -> float:
        return self.gauge(singular_values(M, tol))


@dataclass(frozen=True)
class LiebFunctional:
    """
    A member of the canonical family of Lieb functionals

    Attributes
    ----------
    kind: str
        One of det, per, rho, elem, or norm
    k: int, optional
        The order of an elementary symmetric function
    norm_kind: NormKind, optional
        The norm, when kind is "norm"
    """

    kind: str
    k: int = None
    norm_kind: NormKind = None

    KINDS: ClassVar[tuple] = ("det", "per", "rho", "elem", "norm")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"Unknown Lieb functional '{self.kind}'")
        if self.kind == "elem" and (self.k is None or self.k < 1):
            raise ValueError("Elementary symmetric functions need an order k >= 1")
        if self.kind == "norm" and self.norm_kind is None:
            raise ValueError("A norm functional needs a NormKind")

    @classmethod
    def det(cls) -> LiebFunctional:
        return cls("det")

    @classmethod
    def per(cls) -> LiebFunctional:
        return cls("per")

    @classmethod
    def rho(cls) -> LiebFunctional:
        return cls("rho")

    @classmethod
    def elem(cls, k: int) -> LiebFunctional:
        return cls("elem", k=k)

    @classmethod
    def norm(cls, norm_kind: NormKind | str) -> LiebFunctional:
        if isinstance(norm_kind, str):
            norm_kind = NormKind.from_name(norm_kind)
        return cls("norm", norm_kind=norm_kind)

    @property
    def name(self) -> str:
        if self.kind == "elem":
            return f"e{self.k}"
        if self.kind == "norm":
            return str(self.norm_kind)
        return self.kind

    def __str__(self) -> str:
        return self.name

    @classmethod
    def from_name(cls, name: str) -> LiebFunctional:
        """
        Parse a functional name: det, per, rho, e<k>, or any norm name

        Raises
        ------
        ValueError
            If the name is not recognized
        """
        if name in ("det", "per", "rho"):
            return cls(name)
        match = re.fullmatch(r"e([0-9]+)", name)
        if match:
            return cls.elem(int(match.group(1)))
        return cls.norm(NormKind.from_name(name))

    def applies_to(self, dim: int) -> bool:
        """
        Whether this functional can be evaluated on dim x dim matrices
        """
        if self.kind == "per":
            return dim <= MAX_PERMANENT_DIM
        if self.kind == "elem":
            return self.k <= dim
        return True

    def __call__(self, M, tol: Tolerance = DEFAULT_TOL) -> complex:
        return lieb_eval(self, M, tol)


def lieb_eval(f: LiebFunctional, M, tol: Tolerance = DEFAULT_TOL) -> complex:
    """
    Evaluate a Lieb functional on a square matrix

    The spectral radius and the elementary symmetric functions of a Hermitian
    matrix come from its eigenvalues. Otherwise they come from the roots and the
    coefficients of the characteristic polynomial.

    Parameters
    ----------
    f: LiebFunctional
        The functional to evaluate
    M: CMatrix
        A square matrix
    tol: Tolerance, optional
        The tolerances to use

    Returns
    -------
    complex
        The value of f(M)

    Raises
    ------
    TooLargeForPermanent
        For permanents of matrices beyond 12 x 12
    RootFindingFailed
        If the characteristic polynomial roots cannot be found
    MatrixError
        If e_k is requested for k > n
    """
    M = as_square(M)
    n = M.shape[0]
    if f.kind == "det":
        return determinant(M)
    if f.kind == "per":
        return permanent(M)
    if f.kind == "norm":
        return complex(f.norm_kind(M, tol))
    hermitian = is_hermitian(M, tol)
    if f.kind == "rho":
        if hermitian:
            return complex(np.max(np.abs(herm_eig(M, tol).eigenvalues)))
        return complex(np.max(np.abs(poly_roots(char_poly(M), tol))))
    if f.k > n:
        raise MatrixError(f"Cannot take e_{f.k} of a {n}x{n} matrix")
    if hermitian:
        return elementary_symmetric(herm_eig(M, tol).eigenvalues, f.k)
    return complex((-1) ** f.k * char_poly(M)[f.k])


GRID = np.concatenate(([0.0], 2.0 ** np.arange(-8, 9)))


def _power(v: float) -> ScalarFn:
    return lambda t: np.power(t, v)


@dataclass(frozen=True)
class FactorPair:
    """
    A pair of nonnegative continuous functions with g(t) h(t) = t on [0, inf)

    Attributes
    ----------
    kind: str
        One of sqrt, power, or custom
    v: float
        The exponent of g(t) = t^v for the power family, so that h(t) = t^(1-v)
    g: ScalarFn
        The first factor
    h: ScalarFn
        The second factor
    """

    kind: str
    v: float = 0.5
    g: ScalarFn = field(default=None, repr=False, compare=False)
    h: ScalarFn = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("sqrt", "power", "custom"):
            raise ValueError(f"Unknown factor pair '{self.kind}'")
        if self.kind == "custom":
            if self.g is None or self.h is None:
                raise ValueError("Custom factor pairs need both g and h")
            self.validate()
            return
        if not 0 <= self.v <= 1:
            raise ValueError(f"Power pairs need an exponent in [0, 1], not {self.v}")
        if self.kind == "sqrt":
            object.__setattr__(self, "v", 0.5)
            object.__setattr__(self, "g", np.sqrt)
            object.__setattr__(self, "h", np.sqrt)
        else:
            object.__setattr__(self, "g", _power(self.v))
            object.__setattr__(self, "h", _power(1 - self.v))

    @classmethod
    def sqrt(cls) -> FactorPair:
        return cls("sqrt")

    @classmethod
    def power(cls, v: float) -> FactorPair:
        return cls("power", v=v)

    @classmethod
    def custom(cls, g: ScalarFn, h: ScalarFn) -> FactorPair:
        return cls("custom", g=g, h=h)

    @classmethod
    def from_name(cls, name: str) -> FactorPair:
        """
        Parse "sqrt" or "power:<v>"
        """
        if name == "sqrt":
            return cls.sqrt()
        match = re.fullmatch(r"power:([0-9.eE+-]+)", name)
        if not match:
            raise ValueError(f"Unknown factor pair '{name}'")
        return cls.power(float(match.group(1)))

    @property
    def name(self) -> str:
        if self.kind == "power":
            return f"power:{self.v:g}"
        return self.kind

    def __str__(self) -> str:
        return self.name

    def swapped(self) -> FactorPair:
        """
        The pair (h, g)
        """
        if self.kind == "custom":
            return FactorPair.custom(self.h, self.g)
        if self.kind == "sqrt":
            return self
        return FactorPair.power(1 - self.v)

    def validate(self, lam_max: float = None, tol: Tolerance = DEFAULT_TOL):
        """
        Check g(t) h(t) = t and g, h >= 0 on a grid of sample points

        The grid is {0, 2^-8, ..., 2^8}, rescaled onto [0, lam_max] when lam_max
        exceeds 2^8

        Raises
        ------
        ValueError
            If either property fails at any grid point
        """
        grid = GRID
        if lam_max is not None and lam_max > GRID[-1]:
            grid = GRID * (lam_max / GRID[-1])
        g, h = np.asarray(self.g(grid)), np.asarray(self.h(grid))
        if np.any(g < 0) or np.any(h < 0):
            raise ValueError("The factors of a pair must be nonnegative")
        bad = np.abs(g * h - grid) > np.array([tol.bound(t) for t in grid])
        if np.any(bad):
            raise ValueError(
                f"g(t) h(t) != t at t = {grid[np.argmax(bad)]:g} for this factor pair"
            )

    def squares(
        self, dec: EigDecomp, tol: Tolerance = DEFAULT_TOL
    ) -> tuple[CMatrix, CMatrix]:
        """
        (g^2(A), h^2(A)) from a precomputed eigendecomposition of a PSD matrix A
        """
        if self.kind == "custom" and dec.dim:
            self.validate(float(dec.eigenvalues[0]), tol)
        g, h = self.g, self.h
        return (
            dec.apply(lambda t: np.asarray(g(t)) ** 2, tol),
            dec.apply(lambda t: np.asarray(h(t)) ** 2, tol),
        )


def apply_pair(
    p: FactorPair, A, tol: Tolerance = DEFAULT_TOL
) -> tuple[CMatrix, CMatrix]:
    """
    Compute (g^2(A), h^2(A)) for a PSD matrix A via functional calculus

    Raises
    ------
    NotPsd
        If A is not positive semidefinite
    """
    return p.squares(spectral(A, tol), tol)


def lieb_axiom_outcomes(
    f: LiebFunctional,
    gen: np.random.Generator,
    dim: int,
    /,
    tol: Tolerance = DEFAULT_TOL,
    **ctx,
) -> list[CheckOutcome]:
    """
    Sample both defining properties of a Lieb functional, plus the equivalent
    block form, on one set of random draws

    Three outcomes are recorded:

    1. monotone: f(A) <= f(B) for random PSD A <= B
    2. cs: |f(A*B)|^2 <= f(A*A) f(B*B) for random A and B
    3. block: |f(C)|^2 <= f(A) f(B) for a random PSD block [[A, C*], [C, B]]
    """
    ctx.setdefault("check_id", "check_lieb_axioms")
    ctx.setdefault("functional", f.name)
    A = draw(Ensemble.PSD, dim, gen)
    B = A + draw(Ensemble.PSD, dim, gen)
    X, Y = draw(Ensemble.GINIBRE, dim, gen), draw(Ensemble.GINIBRE, dim, gen)
    M = draw(Ensemble.PSD, 2 * dim, gen)
    outcomes = [
        CheckOutcome.compare(
            f(A, tol).real, f(B, tol).real, tol, variant="monotone", **ctx
        )
    ]
    lhs = abs(f(adjoint(X) @ Y, tol)) ** 2
    rhs = f(adjoint(X) @ X, tol).real * f(adjoint(Y) @ Y, tol).real
    outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="cs", **ctx))
    top, C, bottom = M[:dim, :dim], M[dim:, :dim], M[dim:, dim:]
    lhs = abs(f(C, tol)) ** 2
    rhs = f(top, tol).real * f(bottom, tol).real
    outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="block", **ctx))
    return outcomes


def check_lieb_axioms(
    f: LiebFunctional,
    trials: int,
    dims: list[int],
    seed: int,
    tol: Tolerance = DEFAULT_TOL,
    log: logging.Logger = None,
) -> list[CheckOutcome]:
    """
    Sample the Lieb axioms of a functional over seeded random draws

    Parameters
    ----------
    f: LiebFunctional
        The functional to test
    trials: int
        The number of trials per dimension
    dims: list[int]
        The matrix sizes to test
    seed: int
        The master seed
    tol: Tolerance, optional
        The tolerances to use
    log: Logger, optional
        A logging instance

    Returns
    -------
    list[CheckOutcome]
        Three outcomes per trial and dimension (see :py:func:`lieb_axiom_outcomes`).
        Solver failures are recorded as inconclusive outcomes.
    """
    log = log or logging.getLogger(__name__)
    check_id = "check_lieb_axioms"
    if trials < 1:
        raise ValueError("At least one trial is required")
    outcomes = []
    for dim, trial in product(dims, range(trials)):
        if not f.applies_to(dim):
            log.debug(f"Skipping {f.name} at n = {dim}")
            continue
        gen, trial_seed = rng_for(seed, check_id, dim, trial)
        ctx = dict(
            check_id=check_id, functional=f.name, dim=dim, trial=trial, seed=trial_seed
        )
        try:
            outcomes.extend(lieb_axiom_outcomes(f, gen, dim, tol, **ctx))
        except MatrixError as err:
            log.warning(f"Trial {trial} at n = {dim} was inconclusive: {err}")
            outcomes.append(CheckOutcome.inconclusive(str(err), **ctx))
    return outcomes
