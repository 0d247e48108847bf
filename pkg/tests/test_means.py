import numpy as np
import pytest
from mpmath import mp

import matrixcs.means
from matrixcs.linalg import frobenius, is_psd, adjoint, loewner_leq
from matrixcs.ensembles import Ensemble, draw, rng
from matrixcs.errors import (
    NotPsd,
    NotSquare,
    ShapeMismatch,
    HermitizationFailed,
    NotPositiveDefinite,
)
from matrixcs.means import (
    WeightedMeanQuery,
    gm_block,
    geom_mean,
    require_pd,
    weighted_geom_mean,
)


def _get_pd_pair(n=4, seed=7):
    gen = rng(seed)
    return draw(Ensemble.PD, n, gen), draw(Ensemble.PD, n, gen)


def _wgm(A, B, t):
    return weighted_geom_mean(WeightedMeanQuery(A, B, t))


def _newton_riccati(A, B, steps=60):
    """
    Solve X A^-1 X = B by Newton's method, with each step a Sylvester equation

    Starting from the arithmetic mean keeps every iterate PD.
    """
    n = A.shape[0]
    eye = np.eye(n)
    A_inv = np.linalg.inv(A)
    X = (A + B) / 2
    for _ in range(steps):
        residual = B - X @ A_inv @ X
        # vec(P H Q) = kron(Q.T, P) vec(H) in column-major order
        lhs = np.kron(eye, X @ A_inv) + np.kron((A_inv @ X).T, eye)
        step = np.linalg.solve(lhs, residual.flatten(order="F"))
        step = step.reshape((n, n), order="F")
        X = X + step
        if frobenius(step) < 1e-15 * frobenius(X):
            break
    return (X + adjoint(X)) / 2


class TestGeomMean:
    def test_diagonal(self):
        mean = geom_mean(np.diag([2, 8]), np.diag([8, 2]))
        np.testing.assert_allclose(mean, 4 * np.eye(2), atol=1e-13)

    def test_riccati(self):
        # A # B is the unique PD solution of X A^-1 X = B
        A, B = _get_pd_pair()
        X = geom_mean(A, B)
        residual = X @ np.linalg.inv(A) @ X - B
        assert frobenius(residual) < 1e-8 * frobenius(B)
        assert is_psd(X)

    @pytest.mark.parametrize("seed", range(100))
    def test_newton_riccati(self, seed):
        A, B = _get_pd_pair(3, seed=1000 + seed)
        np.testing.assert_allclose(
            geom_mean(A, B), _newton_riccati(A, B), rtol=1e-9, atol=1e-9
        )

    def test_symmetric(self):
        A, B = _get_pd_pair(3, seed=12)
        assert frobenius(geom_mean(A, B) - geom_mean(B, A)) < 1e-9

    def test_hermitian_output(self):
        A, B = _get_pd_pair(5, seed=2)
        X = geom_mean(A, B)
        assert np.array_equal(X, adjoint(X))

    def test_scalar_multiples(self):
        A, _ = _get_pd_pair(3, seed=5)
        np.testing.assert_allclose(geom_mean(A, 4 * A), 2 * A, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_congruence(self, seed):
        # X* (A # B) X = (X* A X) # (X* B X) for invertible X
        A, B = _get_pd_pair(3, seed=20 + seed)
        X = draw(Ensemble.GINIBRE, 3, rng(30 + seed)) + np.eye(3)
        lhs = adjoint(X) @ geom_mean(A, B) @ X
        rhs = geom_mean(adjoint(X) @ A @ X, adjoint(X) @ B @ X)
        assert frobenius(lhs - rhs) < 1e-8 * max(1, frobenius(lhs))

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone(self, seed):
        # A <= A' implies A # B <= A' # B
        A, B = _get_pd_pair(3, seed=40 + seed)
        bigger = A + draw(Ensemble.PSD, 3, rng(50 + seed))
        assert loewner_leq(geom_mean(A, B), geom_mean(bigger, B))

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite) as info:
            geom_mean(np.diag([1.0, 0.0]), np.eye(2))
        assert info.value.lam_min == pytest.approx(0)
        with pytest.raises(NotPositiveDefinite):
            geom_mean(np.eye(2), np.diag([1.0, -1.0]))

    def test_shapes(self):
        with pytest.raises(ShapeMismatch):
            geom_mean(np.eye(2), np.eye(3))
        with pytest.raises(NotSquare):
            geom_mean(np.ones((2, 3)), np.eye(2))

    def test_hermitization_failure(self, monkeypatch):
        # a non-Hermitian fractional power leaves a large anti-Hermitian part
        def skewed(A, fn, tol):
            return np.triu(np.ones(A.shape))

        monkeypatch.setattr(matrixcs.means, "apply_fn", skewed)
        with pytest.raises(HermitizationFailed):
            geom_mean(np.eye(3), 2 * np.eye(3))


class TestWeightedGeomMean:
    def test_endpoints(self):
        A, B = _get_pd_pair()
        np.testing.assert_allclose(_wgm(A, B, 0), A, atol=1e-14)
        np.testing.assert_allclose(_wgm(A, B, 1), B, atol=1e-14)

    def test_endpoints_still_need_pd(self):
        with pytest.raises(NotPositiveDefinite):
            _wgm(np.eye(2), np.zeros((2, 2)), 0)

    def test_commuting(self):
        A, B = np.diag([1.0, 4.0, 9.0]), np.diag([16.0, 1.0, 1.0])
        for t in (0.25, 0.5, 0.75):
            expected = np.diag(np.diag(A) ** (1 - t) * np.diag(B) ** t)
            np.testing.assert_allclose(_wgm(A, B, t), expected, atol=1e-12)

    def test_half_is_geom_mean(self):
        A, B = _get_pd_pair(3, seed=9)
        np.testing.assert_allclose(_wgm(A, B, 0.5), geom_mean(A, B))

    def test_reversed_weight(self):
        # A #_t B = B #_(1-t) A
        A, B = _get_pd_pair(3, seed=4)
        assert frobenius(_wgm(A, B, 0.3) - _wgm(B, A, 0.7)) < 1e-9

    @pytest.mark.parametrize("s, t", [(0, 1), (0.2, 0.6), (0.25, 0.75), (0.5, 1)])
    def test_midpoint(self, s, t):
        # A #_((s+t)/2) B = (A #_s B) # (A #_t B)
        A, B = _get_pd_pair(3, seed=15)
        lhs = _wgm(A, B, (s + t) / 2)
        rhs = geom_mean(_wgm(A, B, s), _wgm(A, B, t))
        assert frobenius(lhs - rhs) < 1e-8 * max(1, frobenius(lhs))

    def test_quarter_weight_high_precision(self):
        A, B = _get_pd_pair(3, seed=16)
        with mp.workdps(40):
            a_half = mp.sqrtm(mp.matrix(A.tolist()))
            a_inv_half = mp.inverse(a_half)
            middle = a_inv_half * mp.matrix(B.tolist()) * a_inv_half
            exact = a_half * mp.powm(middle, mp.mpf(1) / 4) * a_half
            rows = exact.tolist()
        expected = np.array([[complex(x) for x in row] for row in rows])
        np.testing.assert_allclose(_wgm(A, B, 0.25), expected, rtol=1e-9, atol=1e-10)

    def test_bad_weight(self):
        with pytest.raises(ValueError):
            WeightedMeanQuery(np.eye(2), np.eye(2), 1.5)


def test_require_pd():
    dec = require_pd(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(dec.eigenvalues, [3, 1])
    with pytest.raises(NotPositiveDefinite):
        require_pd(np.diag([1.0, 1e-14]))


def test_gm_block():
    A, B = _get_pd_pair(3, seed=1)
    M = gm_block(A, B)
    assert M.shape == (6, 6)
    assert is_psd(M)


def test_gm_block_is_certified(monkeypatch):
    # an off-diagonal block larger than A and B cannot sit in a PSD block
    monkeypatch.setattr(matrixcs.means, "geom_mean", lambda A, B, tol: 10 * A)
    with pytest.raises(NotPsd):
        gm_block(np.eye(2), np.eye(2))


@pytest.mark.slow
def test_ando_bound():
    # a PSD block [[A, C], [C, B]] with Hermitian C has -A # B <= C <= A # B
    gen = rng(80)
    for trial in range(1000):
        A, D = draw(Ensemble.PD, 3, gen), draw(Ensemble.PD, 3, gen)
        C = draw(Ensemble.HERMITIAN, 3, gen)
        # the Schur complement of A is D
        B = C @ np.linalg.solve(A, C) + D
        B = (B + adjoint(B)) / 2
        mean = geom_mean(A, B)
        assert loewner_leq(C, mean), trial
        assert loewner_leq(-C, mean), trial
