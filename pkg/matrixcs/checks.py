"""
The verification corpus: every inequality as a seeded, tolerance-aware predicate

Each ``check_*`` function evaluates the sides of one or more inequalities on
explicit inputs and returns a list of :py:class:`~matrixcs.data.CheckOutcome`.
Scalar inequalities lhs <= rhs are recorded as they are. Order relations X <= Y
are recorded with lhs = 0 and rhs = lambda_min(Y - X). Any keyword arguments
beyond the inputs (check_id, dim, trial, seed, ...) are copied into the outcomes.

The ``CHECKS`` registry maps every check name to a runner that draws the inputs
of a single :py:class:`Trial` and calls the check for every selected functional
and factor pair.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data import CheckOutcome, PASS, FAIL
from .tolerance import Tolerance, DEFAULT_TOL
from .ensembles import Ensemble, draw, rng, rng_for
from .means import geom_mean, weighted_geom_mean, require_pd, WeightedMeanQuery
from .errors import MatrixError, NotPositiveDefinite
from .lieb import LiebFunctional, NormKind, FactorPair, lieb_axiom_outcomes
from .blocks import (
    Block2x2,
    make_block,
    pinch_decompose,
    lemma03_block,
    gm_block_merge,
    remark13_decompose,
)
from .linalg import (
    CMatrix,
    PolarParts,
    adjoint,
    herm_eig,
    abs_decomp,
    abs_matrix,
    lambda_min,
    polar_parts,
    singular_values,
)


CORPUS_PERMANENT_DIM = 6
REGULARIZATION = 1e-6
PD_MARGIN = 1e-3
VIOLATION_MARGIN = 1e-3


def _inner(M: CMatrix, x, y) -> complex:
    """<Mx, y>"""
    return complex(np.vdot(y, M @ x))


def _quad(M: CMatrix, x) -> float:
    return float(np.vdot(x, M @ x).real)


def _pos(f: LiebFunctional, M: CMatrix, tol: Tolerance) -> float:
    # f of a PSD matrix is real up to roundoff
    return float(f(M, tol).real)


def _sq(f: LiebFunctional, M: CMatrix, tol: Tolerance) -> float:
    return abs(f(M, tol)) ** 2


def _ctx(ctx: dict, check_id: str, **defaults) -> dict:
    ctx = dict(ctx)
    ctx.setdefault("check_id", check_id)
    for key, val in defaults.items():
        ctx.setdefault(key, val)
    return ctx


@dataclass(frozen=True)
class PairSquares:
    """
    g^2 and h^2 of |T| and of |T*| for one factor pair
    """

    g_abs: CMatrix
    h_abs: CMatrix
    g_abs_star: CMatrix
    h_abs_star: CMatrix


def pair_squares(
    parts: PolarParts, p: FactorPair, tol: Tolerance = DEFAULT_TOL
) -> PairSquares:
    g_abs, h_abs = p.squares(parts.abs_t_eig, tol)
    g_abs_star, h_abs_star = p.squares(parts.abs_tstar_eig, tol)
    return PairSquares(g_abs, h_abs, g_abs_star, h_abs_star)


def check_cs_norm(
    A, B, X, norm: NormKind, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    The norm Cauchy-Schwarz inequality |||A*XB|||^2 <= |||AA*X||| |||XBB*|||
    """
    ctx = _ctx(ctx, "check_cs_norm", functional=str(norm))
    lhs = norm(adjoint(A) @ X @ B, tol) ** 2
    rhs = norm(A @ adjoint(A) @ X, tol) * norm(X @ B @ adjoint(B), tol)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_det_seiler(A, B, tol: Tolerance = DEFAULT_TOL, **ctx) -> list[CheckOutcome]:
    """
    |det(I + A + B)| <= det(I + |A|) det(I + |B|)
    """
    ctx = _ctx(ctx, "check_det_seiler", functional="det")
    det = LiebFunctional.det()
    eye = np.eye(A.shape[0])
    lhs = abs(det(eye + A + B, tol))
    rhs = _pos(det, eye + abs_matrix(A, tol), tol) * _pos(
        det, eye + abs_matrix(B, tol), tol
    )
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_lieb_cs(
    T,
    f: LiebFunctional,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f(T)|^2 <= f(g^2(|T|)) f(h^2(|T*|))

    With the sqrt pair this is |f(T)|^2 <= f(|T|) f(|T*|).
    """
    ctx = _ctx(ctx, "check_lieb_cs", functional=f.name, pair=pair.name)
    sq = pair_squares(parts or polar_parts(T, tol), pair, tol)
    lhs = _sq(f, T, tol)
    rhs = _pos(f, sq.g_abs, tol) * _pos(f, sq.h_abs_star, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_lieb_weighted(
    T,
    f: LiebFunctional,
    t: float,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    N=None,
    **ctx,
) -> list[CheckOutcome]:
    """
    The weighted inequality |f(T)|^2 <= f(|T*|^(2(1-t))) f(|T|^(2t)) for t in [0, 1]

    Also records |f(T)|^2 <= f(|T|^2) f(I), which comes from the PSD block
    [[|T|^2, T*], [T, I]], and, when a normal matrix N is given,
    |f(N)| <= f(|N|).
    """
    ctx = _ctx(ctx, "check_lieb_weighted", functional=f.name)
    parts = parts or polar_parts(T, tol)
    abs_t_power = parts.abs_t_eig.apply(lambda lam: lam ** (2 * t), tol)
    abs_tstar_power = parts.abs_tstar_eig.apply(lambda lam: lam ** (2 * (1 - t)), tol)
    lhs = _sq(f, T, tol)
    rhs = _pos(f, abs_tstar_power, tol) * _pos(f, abs_t_power, tol)
    outcomes = [CheckOutcome.compare(lhs, rhs, tol, variant="weighted", **ctx)]
    abs_sq = adjoint(T) @ T
    rhs = _pos(f, abs_sq, tol) * _pos(f, np.eye(T.shape[0]), tol)
    outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="identity", **ctx))
    if N is not None:
        lhs = abs(f(N, tol))
        rhs = _pos(f, abs_matrix(N, tol), tol)
        outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="normal", **ctx))
    return outcomes


def check_sum_cs(
    A,
    B,
    f: LiebFunctional,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts_a: PolarParts = None,
    parts_b: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f(A + B)|^2 <= f(g^2(|A|) + g^2(|B|)) f(h^2(|A*|) + h^2(|B*|))
    """
    ctx = _ctx(ctx, "check_sum_cs", functional=f.name, pair=pair.name)
    sq_a = pair_squares(parts_a or polar_parts(A, tol), pair, tol)
    sq_b = pair_squares(parts_b or polar_parts(B, tol), pair, tol)
    lhs = _sq(f, A + B, tol)
    rhs = _pos(f, sq_a.g_abs + sq_b.g_abs, tol) * _pos(
        f, sq_a.h_abs_star + sq_b.h_abs_star, tol
    )
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_convex_cs(
    A,
    B,
    v: float,
    f: LiebFunctional,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts_a: PolarParts = None,
    parts_b: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f((1-v)A + vB)|^2 <= f((1-v)g^2(|A|) + v g^2(|B|)) f((1-v)h^2(|A*|) + v h^2(|B*|))
    """
    ctx = _ctx(ctx, "check_convex_cs", functional=f.name, pair=pair.name)
    sq_a = pair_squares(parts_a or polar_parts(A, tol), pair, tol)
    sq_b = pair_squares(parts_b or polar_parts(B, tol), pair, tol)
    lhs = _sq(f, (1 - v) * A + v * B, tol)
    rhs = _pos(f, (1 - v) * sq_a.g_abs + v * sq_b.g_abs, tol) * _pos(
        f, (1 - v) * sq_a.h_abs_star + v * sq_b.h_abs_star, tol
    )
    return [CheckOutcome.compare(lhs, rhs, tol, note=f"v={v!r}", **ctx)]


def check_norm_sum(
    A,
    B,
    v: float,
    norm: NormKind,
    tol: Tolerance = DEFAULT_TOL,
    parts_a: PolarParts = None,
    parts_b: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |||A + B|||^2 <= ||| |A|^(2v) + |B|^(2v) ||| ||| |A*|^(2(1-v)) + |B*|^(2(1-v)) |||
    """
    ctx = _ctx(ctx, "check_norm_sum", functional=str(norm))
    parts_a = parts_a or polar_parts(A, tol)
    parts_b = parts_b or polar_parts(B, tol)

    def power(p):
        return lambda lam: lam**p

    left = parts_a.abs_t_eig.apply(power(2 * v), tol) + parts_b.abs_t_eig.apply(
        power(2 * v), tol
    )
    right = parts_a.abs_tstar_eig.apply(
        power(2 * (1 - v)), tol
    ) + parts_b.abs_tstar_eig.apply(power(2 * (1 - v)), tol)
    lhs = norm(A + B, tol) ** 2
    rhs = norm(left, tol) * norm(right, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, note=f"v={v!r}", **ctx)]


def check_cartesian_split(
    T,
    f: LiebFunctional,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f(T)|^2 <= f(g^2(|Re T|) + g^2(|Im T|)) f(h^2(|Re T|) + h^2(|Im T|))
    """
    ctx = _ctx(ctx, "check_cartesian_split", functional=f.name, pair=pair.name)
    parts = parts or polar_parts(T, tol)
    g_re, h_re = pair.squares(abs_decomp(parts.re_t, tol), tol)
    g_im, h_im = pair.squares(abs_decomp(parts.im_t, tol), tol)
    lhs = _sq(f, T, tol)
    rhs = _pos(f, g_re + g_im, tol) * _pos(f, h_re + h_im, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_re_im_bounds(
    T,
    f: LiebFunctional,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f(Re T)|^2 and |f(Im T)|^2 are both at most
    f((g^2(|T|) + g^2(|T*|))/2) f((h^2(|T|) + h^2(|T*|))/2)
    """
    ctx = _ctx(ctx, "check_re_im_bounds", functional=f.name, pair=pair.name)
    parts = parts or polar_parts(T, tol)
    sq = pair_squares(parts, pair, tol)
    rhs = _pos(f, (sq.g_abs + sq.g_abs_star) / 2, tol) * _pos(
        f, (sq.h_abs + sq.h_abs_star) / 2, tol
    )
    return [
        CheckOutcome.compare(_sq(f, parts.re_t, tol), rhs, tol, variant="re", **ctx),
        CheckOutcome.compare(_sq(f, parts.im_t, tol), rhs, tol, variant="im", **ctx),
    ]


def check_ando_gm(
    A, B, f: LiebFunctional, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    f^2(A # B) <= f(A) f(B), and in mean form f(A # B) <= sqrt(f(A) f(B))
    """
    ctx = _ctx(ctx, "check_ando_gm", functional=f.name)
    mean = _pos(f, geom_mean(A, B, tol), tol)
    product = _pos(f, A, tol) * _pos(f, B, tol)
    return [
        CheckOutcome.compare(mean**2, product, tol, variant="square", **ctx),
        CheckOutcome.compare(
            mean, np.sqrt(max(product, 0)), tol, variant="mean", **ctx
        ),
    ]


def check_log_convex(
    A, B, f: LiebFunctional, s: float, t: float, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    Mid-point log-convexity of g(t) = f(A #_t B): g((s+t)/2)^2 <= g(s) g(t)
    """
    ctx = _ctx(ctx, "check_log_convex", functional=f.name)

    def g(weight):
        return _pos(f, weighted_geom_mean(WeightedMeanQuery(A, B, weight), tol), tol)

    lhs = g((s + t) / 2) ** 2
    rhs = g(s) * g(t)
    return [CheckOutcome.compare(lhs, rhs, tol, note=f"s={s!r} t={t!r}", **ctx)]


def check_gencondii(
    A, B, t: float, f: LiebFunctional, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    The convex form of the Cauchy-Schwarz axiom:
    |f(tB*A + (1-t)A*B)|^2 <= f(tA*A + (1-t)B*B) f(tB*B + (1-t)A*A)

    The convex combination of the PSD blocks [A B]*[A B] and [B A]*[B A] has
    these diagonal blocks and this off-diagonal block.
    """
    ctx = _ctx(ctx, "check_gencondii", functional=f.name)
    AA, BB = adjoint(A) @ A, adjoint(B) @ B
    C = t * adjoint(B) @ A + (1 - t) * adjoint(A) @ B
    lhs = _sq(f, C, tol)
    rhs = _pos(f, t * AA + (1 - t) * BB, tol) * _pos(f, t * BB + (1 - t) * AA, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, note=f"t={t!r}", **ctx)]


def check_gather(
    A, B, f: LiebFunctional, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    |f(Re(B*A))| <= f((A*A + B*B)/2)
    """
    ctx = _ctx(ctx, "check_gather", functional=f.name)
    lhs = abs(f((adjoint(B) @ A + adjoint(A) @ B) / 2, tol))
    rhs = _pos(f, (adjoint(A) @ A + adjoint(B) @ B) / 2, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_gm_blocks(
    b1: Block2x2, b2: Block2x2, f: LiebFunctional, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    For PSD blocks [[A_j, C*], [C, B_j]] with a shared C:
    |f(C)|^2 <= f(A1 # A2) f(B1 # B2)

    The merged block [[A1 # A2, C*], [C, B1 # B2]] is also recorded as an order
    relation.
    """
    ctx = _ctx(ctx, "check_gm_blocks", functional=f.name)
    merged = gm_block_merge(b1, b2, tol, certify=False)
    lhs = _sq(f, merged.c, tol)
    rhs = _pos(f, merged.a, tol) * _pos(f, merged.b, tol)
    return [
        CheckOutcome.compare(lhs, rhs, tol, variant="lieb", **ctx),
        CheckOutcome.loewner(
            lambda_min(merged.assembled, tol), tol, variant="block", **ctx
        ),
    ]


def check_offblock(
    M: Block2x2, f: LiebFunctional, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    |f(C + C*)|^2 <= f^2(A + B) for a PSD block [[A, C*], [C, B]]
    """
    ctx = _ctx(ctx, "check_offblock", functional=f.name)
    lhs = _sq(f, M.c + adjoint(M.c), tol)
    rhs = _pos(f, M.a + M.b, tol) ** 2
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_offblockT(
    T,
    f: LiebFunctional,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    N=None,
    H=None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |f(T + T*)|^2 is at most both f^2(|T|^2 + I) and f^2(|T| + |T*|)

    When given, a normal N is checked against |f(N + N*)|^2 <= f^2(2|N|) and a
    Hermitian H against |f(2H)|^2 <= f^2(2|H|).
    """
    ctx = _ctx(ctx, "check_offblockT", functional=f.name)
    parts = parts or polar_parts(T, tol)
    eye = np.eye(T.shape[0])
    lhs = _sq(f, T + adjoint(T), tol)
    outcomes = [
        CheckOutcome.compare(
            lhs,
            _pos(f, adjoint(T) @ T + eye, tol) ** 2,
            tol,
            variant="abs_sq_plus_identity",
            **ctx,
        ),
        CheckOutcome.compare(
            lhs,
            _pos(f, parts.abs_t + parts.abs_tstar, tol) ** 2,
            tol,
            variant="abs_sum",
            **ctx,
        ),
    ]
    if N is not None:
        lhs = _sq(f, N + adjoint(N), tol)
        rhs = _pos(f, 2 * abs_matrix(N, tol), tol) ** 2
        outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="normal", **ctx))
    if H is not None:
        lhs = _sq(f, 2 * H, tol)
        rhs = _pos(f, 2 * abs_matrix(H, tol), tol) ** 2
        outcomes.append(
            CheckOutcome.compare(lhs, rhs, tol, variant="self_adjoint", **ctx)
        )
    return outcomes


def check_lemma04(T, x, y, tol: Tolerance = DEFAULT_TOL, **ctx) -> list[CheckOutcome]:
    """
    |<Tx, y>|^2 <= <Tx, x> <Ty, y> for PSD T
    """
    ctx = _ctx(ctx, "check_lemma04")
    lhs = abs(_inner(T, x, y)) ** 2
    rhs = _quad(T, x) * _quad(T, y)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def _mixed_cs(block: Block2x2, x, y, tol: Tolerance) -> tuple[float, float]:
    """
    The two sides of |<Cx, y>|^2 <= <M(x,0), (x,0)> <M(0,y), (0,y)> where M is
    rebuilt from its pinch decomposition
    """
    rebuilt = pinch_decompose(block, tol).reconstruct()
    zero_x, zero_y = np.zeros(block.n), np.zeros(block.m)
    top = np.concatenate((x, zero_y))
    bottom = np.concatenate((zero_x, y))
    lhs = abs(_inner(block.c, x, y)) ** 2
    return lhs, _quad(rebuilt, top) * _quad(rebuilt, bottom)


def check_thm02(
    M: Block2x2, x, y, tol: Tolerance = DEFAULT_TOL, **ctx
) -> list[CheckOutcome]:
    """
    The mixed Cauchy-Schwarz inequality of a PSD block, evaluated through the
    unitaries of its pinch decomposition
    """
    ctx = _ctx(ctx, "check_thm02")
    lhs, rhs = _mixed_cs(M, x, y, tol)
    return [CheckOutcome.compare(lhs, rhs, tol, **ctx)]


def check_thm12(
    T,
    pair: FactorPair,
    /,
    x,
    y,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    The mixed Cauchy-Schwarz inequality of the block
    [[g^2(|T|), T*], [T, h^2(|T*|)]], for the vector pair (x, y) and for (x, x)
    """
    ctx = _ctx(ctx, "check_thm12", pair=pair.name)
    block = lemma03_block(T, pair, tol, parts=parts, certify=False)
    outcomes = []
    for variant, second in (("xy", y), ("xx", x)):
        lhs, rhs = _mixed_cs(block, x, second, tol)
        outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant=variant, **ctx))
    return outcomes


def check_nee1(
    T,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    ||T|| <= (||S + Re T|| + ||S - Re T||)/2 with S = (g^2(|T|) + h^2(|T*|))/2

    Also records the special case
    ||T|| <= (|| |T| + |T*| + 2 Re T || + || |T| + |T*| - 2 Re T ||)/4
    """
    ctx = _ctx(ctx, "check_nee1", functional="operator", pair=pair.name)
    operator = NormKind("operator")
    parts = parts or polar_parts(T, tol)
    pinch = remark13_decompose(T, pair, tol)
    lhs = operator(T, tol)
    rhs = (operator(pinch.top, tol) + operator(pinch.bottom, tol)) / 2
    outcomes = [CheckOutcome.compare(lhs, rhs, tol, variant="pair", **ctx)]
    abs_sum = parts.abs_t + parts.abs_tstar
    plus = operator(abs_sum + 2 * parts.re_t, tol)
    minus = operator(abs_sum - 2 * parts.re_t, tol)
    rhs = (plus + minus) / 4
    outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="quarter", **ctx))
    return outcomes


def check_thm14(
    T,
    pair: FactorPair,
    /,
    x,
    y,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    A=None,
    B=None,
    **ctx,
) -> list[CheckOutcome]:
    """
    |<Re T x, y>| and |<Im T x, y>| are at most
    sqrt(<(g^2(|T|) + g^2(|T*|))x, x> <(h^2(|T|) + h^2(|T*|))y, y>)/2

    When A and B are given, the sum form
    |<(A+B)x, y>|^2 <= <(g^2(|A|) + g^2(|B|))x, x> <(h^2(|A*|) + h^2(|B*|))y, y>
    is recorded too.
    """
    ctx = _ctx(ctx, "check_thm14", pair=pair.name)
    parts = parts or polar_parts(T, tol)
    sq = pair_squares(parts, pair, tol)
    F, G = sq.g_abs + sq.g_abs_star, sq.h_abs + sq.h_abs_star
    rhs = np.sqrt(max(_quad(F, x) * _quad(G, y), 0)) / 2
    outcomes = [
        CheckOutcome.compare(
            abs(_inner(parts.re_t, x, y)), rhs, tol, variant="re", **ctx
        ),
        CheckOutcome.compare(
            abs(_inner(parts.im_t, x, y)), rhs, tol, variant="im", **ctx
        ),
    ]
    if A is not None and B is not None:
        sq_a = pair_squares(polar_parts(A, tol), pair, tol)
        sq_b = pair_squares(polar_parts(B, tol), pair, tol)
        lhs = abs(_inner(A + B, x, y)) ** 2
        rhs = _quad(sq_a.g_abs + sq_b.g_abs, x) * _quad(
            sq_a.h_abs_star + sq_b.h_abs_star, y
        )
        outcomes.append(CheckOutcome.compare(lhs, rhs, tol, variant="sum", **ctx))
    return outcomes


def check_eq16_15(
    T,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    Positivity of [[F/2, Re T], [Re T, G/2]], of [[F/2, Im T], [Im T, G/2]], and of
    [[F, Re T + Im T], [Re T + Im T, G]], where F = g^2(|T|) + g^2(|T*|) and
    G = h^2(|T|) + h^2(|T*|)
    """
    ctx = _ctx(ctx, "check_eq16_15", pair=pair.name)
    parts = parts or polar_parts(T, tol)
    sq = pair_squares(parts, pair, tol)
    F, G = sq.g_abs + sq.g_abs_star, sq.h_abs + sq.h_abs_star
    blocks = {
        "re": make_block(F / 2, parts.re_t, G / 2),
        "im": make_block(F / 2, parts.im_t, G / 2),
        "re_plus_im": make_block(F, parts.re_t + parts.im_t, G),
    }
    return [
        CheckOutcome.loewner(
            lambda_min(block.assembled, tol), tol, variant=variant, **ctx
        )
        for variant, block in blocks.items()
    ]


def _regularized(M: CMatrix, tol: Tolerance) -> tuple[CMatrix, bool]:
    try:
        require_pd(M, tol)
        return M, False
    except NotPositiveDefinite:
        return M + REGULARIZATION * np.eye(M.shape[0]), True


def check_rem_imre(
    T,
    pair: FactorPair,
    /,
    tol: Tolerance = DEFAULT_TOL,
    parts: PolarParts = None,
    **ctx,
) -> list[CheckOutcome]:
    """
    The geometric mean bounds on the Cartesian parts of T

    With F = g^2(|T|) + g^2(|T*|) and G = h^2(|T|) + h^2(|T*|), each of these is
    recorded with both signs:

    - re_plus_im: ±(Re T + Im T) <= F # G
    - re: ±Re T <= (F/2) # (G/2)
    - im: ±Im T <= (F/2) # (G/2)
    - abs_re: ±Re T <= (|T| + |T*|)/2
    - abs_im: ±Im T <= (|T| + |T*|)/2

    F and G are shifted by 1e-6 I when they are singular, which only enlarges the
    right-hand sides. The shift is noted in the outcomes.
    """
    ctx = _ctx(ctx, "check_rem_imre", pair=pair.name)
    parts = parts or polar_parts(T, tol)
    sq = pair_squares(parts, pair, tol)
    F, shifted_f = _regularized(sq.g_abs + sq.g_abs_star, tol)
    G, shifted_g = _regularized(sq.h_abs + sq.h_abs_star, tol)
    note = ctx.pop("note", "")
    if shifted_f or shifted_g:
        note = f"regularized by {REGULARIZATION:g}"
    full = geom_mean(F, G, tol)
    half = geom_mean(F / 2, G / 2, tol)
    abs_half = (parts.abs_t + parts.abs_tstar) / 2
    bounds = {
        "re_plus_im": (parts.re_t + parts.im_t, full),
        "re": (parts.re_t, half),
        "im": (parts.im_t, half),
        "abs_re": (parts.re_t, abs_half),
        "abs_im": (parts.im_t, abs_half),
    }
    outcomes = []
    for variant, (X, bound) in bounds.items():
        for sign, label in ((1, "+"), (-1, "-")):
            outcomes.append(
                CheckOutcome.loewner(
                    lambda_min(bound - sign * X, tol),
                    tol,
                    variant=variant + label,
                    note=note if variant[:3] != "abs" else "",
                    **ctx,
                )
            )
    return outcomes


@dataclass(frozen=True)
class Counterexample:
    """
    The 3 x 3 nilpotent T with ones on the superdiagonal, for which
    |T + T*| <= |T| + |T*| fails

    Attributes
    ----------
    T: CMatrix
        The nilpotent matrix
    abs_sum: CMatrix
        |T| + |T*| = diag(1, 2, 1)
    re_sum: CMatrix
        T + T*
    sigma_abs_sum: np.ndarray
        The singular values of |T| + |T*|: (2, 1, 1)
    sigma_re_sum: np.ndarray
        The singular values of T + T*: (sqrt 2, sqrt 2, 0)
    lam_min: float
        lambda_min(|T| + |T*| - |T + T*|) = 1 - sqrt 2
    witness: np.ndarray
        The eigenvector for lam_min
    """

    T: CMatrix
    abs_sum: CMatrix
    re_sum: CMatrix
    sigma_abs_sum: np.ndarray
    sigma_re_sum: np.ndarray
    lam_min: float
    witness: np.ndarray = field(repr=False)


EXPECTED_SIGMA_ABS_SUM = np.array([2.0, 1.0, 1.0])
EXPECTED_SIGMA_RE_SUM = np.array([np.sqrt(2), np.sqrt(2), 0.0])


def nilpotent_example() -> CMatrix:
    return np.diag(np.ones(2, dtype=np.complex128), k=1)


def counterexample_details(tol: Tolerance = DEFAULT_TOL) -> Counterexample:
    """
    Compute every quantity of the fixed counterexample
    """
    T = nilpotent_example()
    parts = polar_parts(T, tol)
    abs_sum = parts.abs_t + parts.abs_tstar
    re_sum = T + adjoint(T)
    dec = herm_eig(abs_sum - abs_matrix(re_sum, tol), tol)
    return Counterexample(
        T=T,
        abs_sum=abs_sum,
        re_sum=re_sum,
        sigma_abs_sum=singular_values(abs_sum, tol),
        sigma_re_sum=singular_values(re_sum, tol),
        lam_min=float(dec.eigenvalues[-1]),
        witness=dec.basis[:, -1],
    )


def reproduce_counterexample(
    tol: Tolerance = DEFAULT_TOL, sigma_tol: float = 1e-10
) -> CheckOutcome:
    """
    Confirm that |T + T*| <= |T| + |T*| fails for the 3 x 3 nilpotent T

    The outcome has lhs = lambda_min(|T| + |T*| - |T + T*|) and rhs = -1e-3, so it
    passes exactly when the violation is confirmed. It fails if either list of
    singular values is off by more than sigma_tol.
    """
    ex = counterexample_details(tol)
    ctx = dict(check_id="reproduce_counterexample", dim=3)
    outcome = CheckOutcome.compare(ex.lam_min, -VIOLATION_MARGIN, tol, **ctx)
    errors = (
        np.max(np.abs(ex.sigma_abs_sum - EXPECTED_SIGMA_ABS_SUM)),
        np.max(np.abs(ex.sigma_re_sum - EXPECTED_SIGMA_RE_SUM)),
    )
    if max(errors) > sigma_tol:
        note = f"singular values are off by {max(errors):.3e}"
        return CheckOutcome(
            lhs=outcome.lhs,
            rhs=outcome.rhs,
            margin=outcome.margin,
            status=FAIL,
            note=note,
            **ctx,
        )
    return outcome


@dataclass(frozen=True)
class SearchResult:
    """
    A tally of random matrices T for which |T + T*| <= |T| + |T*| fails

    Attributes
    ----------
    dim: int
        The matrix size
    draws: int
        The number of Ginibre matrices tried
    violations: int
        The number of draws with lambda_min(|T| + |T*| - |T + T*|) < -1e-3
    worst_lam_min: float
        The smallest lambda_min over every draw
    worst_seed: int
        The trial seed that produced worst_lam_min
    """

    dim: int
    draws: int
    violations: int
    worst_lam_min: float
    worst_seed: int


def search_counterexample(
    dim: int, draws: int, seed: int, tol: Tolerance = DEFAULT_TOL
) -> SearchResult:
    """
    Look for violations of |T + T*| <= |T| + |T*| among random Ginibre matrices

    This only records what was found; finding nothing proves nothing.
    """
    violations, worst, worst_seed = 0, np.inf, 0
    for trial in range(draws):
        gen, trial_seed = rng_for(seed, "search_counterexample", dim, trial)
        T = draw(Ensemble.GINIBRE, dim, gen)
        parts = polar_parts(T, tol)
        gap = parts.abs_t + parts.abs_tstar - abs_matrix(T + adjoint(T), tol)
        lam = lambda_min(gap, tol)
        violations += lam < -VIOLATION_MARGIN
        if lam < worst:
            worst, worst_seed = lam, trial_seed
    return SearchResult(dim, draws, int(violations), float(worst), worst_seed)


@dataclass
class Trial:
    """
    The inputs shared by every check in one trial of the corpus

    Attributes
    ----------
    check_id: str
        The name of the check being run
    dim: int
        The matrix size
    trial: int
        The trial number
    seed: int
        The trial seed, from :py:func:`~matrixcs.ensembles.trial_seed`
    functionals: tuple[LiebFunctional, ...]
        The selected Lieb functionals
    pairs: tuple[FactorPair, ...]
        The selected factor pairs
    tol: Tolerance
        The tolerances to use
    log: Logger
        A logging instance for reporting inconclusive outcomes
    """

    check_id: str
    dim: int
    trial: int
    seed: int
    functionals: tuple
    pairs: tuple
    tol: Tolerance = DEFAULT_TOL
    log: logging.Logger = None

    def __post_init__(self):
        self.gen = rng(self.seed)
        self.log = self.log or logging.getLogger(self.__class__.__name__)

    @property
    def ctx(self) -> dict:
        return dict(
            check_id=self.check_id, dim=self.dim, trial=self.trial, seed=self.seed
        )

    def draw(self, kind: Ensemble, n: int = None) -> CMatrix:
        return draw(kind, n or self.dim, self.gen)

    def uniform(self) -> float:
        return float(self.gen.uniform(0, 1))

    @property
    def lieb(self) -> list[LiebFunctional]:
        """
        The selected functionals that can be evaluated at this dimension
        """
        return [
            f
            for f in self.functionals
            if f.applies_to(self.dim)
            and not (f.kind == "per" and self.dim > CORPUS_PERMANENT_DIM)
        ]

    @property
    def norms(self) -> list[NormKind]:
        return [f.norm_kind for f in self.functionals if f.kind == "norm"]

    def guard(
        self, check: Callable, *args, functional: str = "", pair: str = "", **kwargs
    ) -> list[CheckOutcome]:
        """
        Run a check, turning a solver failure into an inconclusive outcome
        """
        ctx = self.ctx
        if functional:
            ctx["functional"] = functional
        if pair:
            ctx["pair"] = pair
        try:
            return check(*args, tol=self.tol, **kwargs, **ctx)
        except MatrixError as err:
            self.log.warning(
                f"{self.check_id} {functional} {pair} was inconclusive at n = "
                f"{self.dim}, trial {self.trial}: {err}"
            )
            return [CheckOutcome.inconclusive(f"{type(err).__name__}: {err}", **ctx)]


def _run_cs_norm(trial: Trial) -> list[CheckOutcome]:
    A, B, X = (trial.draw(Ensemble.GINIBRE) for _ in range(3))
    outcomes = []
    for norm in trial.norms:
        outcomes += trial.guard(check_cs_norm, A, B, X, norm, functional=str(norm))
    return outcomes


def _run_det_seiler(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    return trial.guard(check_det_seiler, A, B, functional="det")


def _run_lieb_cs(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        for f in trial.lieb:
            outcomes += trial.guard(
                check_lieb_cs, T, f, p, parts=parts, functional=f.name, pair=p.name
            )
    return outcomes


def _run_lieb_weighted(trial: Trial) -> list[CheckOutcome]:
    T, N = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.NORMAL)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        for f in trial.lieb:
            outcomes += trial.guard(
                check_lieb_weighted,
                T,
                f,
                p.v,
                parts=parts,
                N=N,
                functional=f.name,
                pair=p.name,
            )
    return outcomes


def _run_sum_cs(trial: Trial, convex: bool = False) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    v = trial.uniform()
    parts = dict(parts_a=polar_parts(A, trial.tol), parts_b=polar_parts(B, trial.tol))
    outcomes = []
    for p in trial.pairs:
        for f in trial.lieb:
            if convex:
                outcomes += trial.guard(
                    check_convex_cs,
                    A,
                    B,
                    v,
                    f,
                    p,
                    functional=f.name,
                    pair=p.name,
                    **parts,
                )
            else:
                outcomes += trial.guard(
                    check_sum_cs, A, B, f, p, functional=f.name, pair=p.name, **parts
                )
    return outcomes


def _run_convex_cs(trial: Trial) -> list[CheckOutcome]:
    return _run_sum_cs(trial, convex=True)


def _run_norm_sum(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    parts = dict(parts_a=polar_parts(A, trial.tol), parts_b=polar_parts(B, trial.tol))
    outcomes = []
    for p in trial.pairs:
        for norm in trial.norms:
            outcomes += trial.guard(
                check_norm_sum,
                A,
                B,
                p.v,
                norm,
                functional=str(norm),
                pair=p.name,
                **parts,
            )
    return outcomes


def _run_per_pair(check: Callable) -> Callable[[Trial], list[CheckOutcome]]:
    """
    A runner for checks of the form check(T, f, pair) on a Ginibre T
    """

    def runner(trial: Trial) -> list[CheckOutcome]:
        T = trial.draw(Ensemble.GINIBRE)
        parts = polar_parts(T, trial.tol)
        outcomes = []
        for p in trial.pairs:
            for f in trial.lieb:
                outcomes += trial.guard(
                    check, T, f, p, parts=parts, functional=f.name, pair=p.name
                )
        return outcomes

    return runner


def _run_ando_gm(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.PD), trial.draw(Ensemble.PD)
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(check_ando_gm, A, B, f, functional=f.name)
    return outcomes


def _run_log_convex(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.PD), trial.draw(Ensemble.PD)
    s, t = trial.uniform(), trial.uniform()
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(check_log_convex, A, B, f, s, t, functional=f.name)
    return outcomes


def _run_gencondii(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    t = trial.uniform()
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(check_gencondii, A, B, t, f, functional=f.name)
    return outcomes


def _run_gather(trial: Trial) -> list[CheckOutcome]:
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(check_gather, A, B, f, functional=f.name)
    return outcomes


def shared_blocks(
    T, p: FactorPair, A2, D, tol: Tolerance = DEFAULT_TOL, parts: PolarParts = None
) -> tuple[Block2x2, Block2x2]:
    """
    Two PSD blocks with the same off-diagonal T and positive definite diagonals

    The first is [[g^2(|T|), T*], [T, h^2(|T*|)]] shifted by 1e-3 I. The second is
    [[A2, T*], [T, T A2^-1 T* + D]] for PD A2 and D, which is PSD since its Schur
    complement is D.
    """
    first = lemma03_block(T, p, tol, parts=parts, certify=False)
    eye = PD_MARGIN * np.eye(T.shape[0])
    first = make_block(first.a + eye, first.c, first.b + eye)
    A2_inv = require_pd(A2, tol).apply(lambda lam: 1 / lam, tol)
    second = make_block(A2, T, T @ A2_inv @ adjoint(T) + D)
    return first, second


def _run_gm_blocks(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    A2, D = trial.draw(Ensemble.PD), trial.draw(Ensemble.PD)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        b1, b2 = shared_blocks(T, p, A2, D, trial.tol, parts=parts)
        for f in trial.lieb:
            outcomes += trial.guard(
                check_gm_blocks, b1, b2, f, functional=f.name, pair=p.name
            )
    return outcomes


def _run_offblock(trial: Trial) -> list[CheckOutcome]:
    M = Block2x2.from_matrix(trial.draw(Ensemble.PSD, 2 * trial.dim), trial.dim)
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(check_offblock, M, f, functional=f.name)
    return outcomes


def _run_offblockT(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    N, H = trial.draw(Ensemble.NORMAL), trial.draw(Ensemble.HERMITIAN)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(
            check_offblockT, T, f, parts=parts, N=N, H=H, functional=f.name
        )
    return outcomes


def _run_lemma04(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.PSD)
    x, y = trial.draw(Ensemble.VECTOR), trial.draw(Ensemble.VECTOR)
    return trial.guard(check_lemma04, T, x, y)


def _run_thm02(trial: Trial) -> list[CheckOutcome]:
    M = Block2x2.from_matrix(trial.draw(Ensemble.PSD, 2 * trial.dim), trial.dim)
    x, y = trial.draw(Ensemble.VECTOR), trial.draw(Ensemble.VECTOR)
    return trial.guard(check_thm02, M, x, y)


def _run_thm12(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    x, y = trial.draw(Ensemble.VECTOR), trial.draw(Ensemble.VECTOR)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        outcomes += trial.guard(check_thm12, T, p, x, y, parts=parts, pair=p.name)
    return outcomes


def _run_nee1(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        outcomes += trial.guard(
            check_nee1, T, p, parts=parts, functional="operator", pair=p.name
        )
    return outcomes


def _run_thm14(trial: Trial) -> list[CheckOutcome]:
    T = trial.draw(Ensemble.GINIBRE)
    x, y = trial.draw(Ensemble.VECTOR), trial.draw(Ensemble.VECTOR)
    A, B = trial.draw(Ensemble.GINIBRE), trial.draw(Ensemble.GINIBRE)
    parts = polar_parts(T, trial.tol)
    outcomes = []
    for p in trial.pairs:
        outcomes += trial.guard(
            check_thm14, T, p, x, y, parts=parts, A=A, B=B, pair=p.name
        )
    return outcomes


def _run_per_pair_only(check: Callable) -> Callable[[Trial], list[CheckOutcome]]:
    """
    A runner for checks of the form check(T, pair) on a Ginibre T
    """

    def runner(trial: Trial) -> list[CheckOutcome]:
        T = trial.draw(Ensemble.GINIBRE)
        parts = polar_parts(T, trial.tol)
        outcomes = []
        for p in trial.pairs:
            outcomes += trial.guard(check, T, p, parts=parts, pair=p.name)
        return outcomes

    return runner


def _run_lieb_axioms(trial: Trial) -> list[CheckOutcome]:
    outcomes = []
    for f in trial.lieb:
        outcomes += trial.guard(
            lieb_axiom_outcomes, f, trial.gen, trial.dim, functional=f.name
        )
    return outcomes


CHECKS: dict[str, Callable[[Trial], list[CheckOutcome]]] = {
    "check_lieb_axioms": _run_lieb_axioms,
    "check_cs_norm": _run_cs_norm,
    "check_det_seiler": _run_det_seiler,
    "check_lieb_cs": _run_lieb_cs,
    "check_lieb_weighted": _run_lieb_weighted,
    "check_sum_cs": _run_sum_cs,
    "check_convex_cs": _run_convex_cs,
    "check_norm_sum": _run_norm_sum,
    "check_cartesian_split": _run_per_pair(check_cartesian_split),
    "check_re_im_bounds": _run_per_pair(check_re_im_bounds),
    "check_ando_gm": _run_ando_gm,
    "check_log_convex": _run_log_convex,
    "check_gencondii": _run_gencondii,
    "check_gather": _run_gather,
    "check_gm_blocks": _run_gm_blocks,
    "check_offblock": _run_offblock,
    "check_offblockT": _run_offblockT,
    "check_lemma04": _run_lemma04,
    "check_thm02": _run_thm02,
    "check_thm12": _run_thm12,
    "check_nee1": _run_nee1,
    "check_thm14": _run_thm14,
    "check_eq16_15": _run_per_pair_only(check_eq16_15),
    "check_rem_imre": _run_per_pair_only(check_rem_imre),
}


def run_trial(
    check_id: str,
    dim: int,
    trial: int,
    master_seed: int,
    functionals: tuple,
    pairs: tuple,
    tol: Tolerance = DEFAULT_TOL,
    log: logging.Logger = None,
) -> list[CheckOutcome]:
    """
    Run one trial of one check

    Failures outside of the individual checks (while computing shared polar parts,
    for example) make the whole trial a single inconclusive outcome.

    Raises
    ------
    KeyError
        If check_id is not in :py:data:`CHECKS`
    """
    runner = CHECKS[check_id]
    _, seed = rng_for(master_seed, check_id, dim, trial)
    ctx = Trial(check_id, dim, trial, seed, functionals, pairs, tol, log)
    try:
        return runner(ctx)
    except MatrixError as err:
        ctx.log.warning(f"{check_id} trial {trial} at n = {dim} is inconclusive: {err}")
        return [CheckOutcome.inconclusive(f"{type(err).__name__}: {err}", **ctx.ctx)]
