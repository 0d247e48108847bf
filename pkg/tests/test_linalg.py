import numpy as np
import pytest
from mpmath import mp
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matrixcs.ensembles import Ensemble, draw, rng
from matrixcs.tolerance import Tolerance, DEFAULT_TOL
from matrixcs.errors import (
    NotPsd,
    NotSquare,
    NotHermitian,
    MatrixError,
    NoConvergence,
    ShapeMismatch,
)
from matrixcs.linalg import (
    svd,
    is_psd,
    adjoint,
    apply_fn,
    herm_eig,
    spectral,
    frobenius,
    abs_matrix,
    as_cmatrix,
    lambda_min,
    loewner_leq,
    polar_parts,
    is_hermitian,
    singular_values,
    unitarity_defect,
)


MATRIX_DIMENSION = 4


def _mp_eigenvalues(H: np.ndarray) -> np.ndarray:
    mp.dps = 32
    E, _ = mp.eighe(mp.matrix(H.tolist()))
    return np.sort([float(mp.re(val)) for val in E])[::-1]


def _mp_singular_values(T: np.ndarray) -> np.ndarray:
    mp.dps = 32
    S = mp.svd_c(mp.matrix(T.tolist()), compute_uv=False)
    return np.sort([float(val) for val in S])[::-1]


class TestHermEig:
    def _get_hermitian(self, n=5, seed=3):
        return draw(Ensemble.HERMITIAN, n, rng(seed))

    def test_against_mpmath(self):
        H = self._get_hermitian()
        dec = herm_eig(H)
        np.testing.assert_allclose(dec.eigenvalues, _mp_eigenvalues(H), atol=1e-13)

    def test_descending_and_unitary(self):
        dec = herm_eig(self._get_hermitian(6, seed=9))
        assert np.all(np.diff(dec.eigenvalues) <= 0)
        assert unitarity_defect(dec.basis) < 1e-12
        assert dec.sweeps > 0

    def test_reconstruct(self):
        H = self._get_hermitian()
        dec = herm_eig(H)
        assert frobenius(dec.reconstruct() - H) < 1e-12

    def test_diagonal_needs_no_sweeps(self):
        dec = herm_eig(np.diag([1.0, 3.0, 2.0]))
        assert dec.sweeps == 0
        np.testing.assert_allclose(dec.eigenvalues, [3, 2, 1])

    def test_pauli(self):
        dec = herm_eig(np.array([[0, -1j], [1j, 0]]))
        np.testing.assert_allclose(dec.eigenvalues, [1, -1], atol=1e-15)

    def test_repeated_eigenvalues(self):
        U = draw(Ensemble.UNITARY, 4, rng(5))
        H = (U * np.array([2.0, 2.0, -1.0, -1.0])) @ adjoint(U)
        dec = herm_eig(H)
        np.testing.assert_allclose(dec.eigenvalues, [2, 2, -1, -1], atol=1e-12)

    def test_one_by_one(self):
        dec = herm_eig(np.array([[4.0]]))
        np.testing.assert_allclose(dec.eigenvalues, [4])
        assert dec.dim == 1

    def test_errors(self):
        with pytest.raises(NotSquare):
            herm_eig(np.ones((2, 3)))
        with pytest.raises(NotHermitian):
            herm_eig(np.array([[1, 2], [0, 1]]))
        with pytest.raises(ShapeMismatch):
            herm_eig(np.ones(3))
        with pytest.raises(NoConvergence):
            herm_eig(self._get_hermitian(), Tolerance(max_sweeps=0))
        # every matrix error is also a ValueError
        with pytest.raises(ValueError):
            herm_eig(np.ones((2, 3)))

    def test_no_convergence_is_a_linalg_error(self):
        with pytest.raises(np.linalg.LinAlgError):
            herm_eig(self._get_hermitian(), Tolerance(max_sweeps=0))

    def test_spectral_reuse(self):
        A = draw(Ensemble.PSD, 4, rng(2))
        dec = spectral(A)
        root = dec.apply(np.sqrt)
        assert frobenius(root @ root - A) < 1e-12
        assert frobenius(dec.apply(lambda lam: lam) - A) < 1e-12


@seed(1)
@settings(deadline=None, max_examples=50)
@given(
    entries=arrays(
        np.float64,
        (2, MATRIX_DIMENSION, MATRIX_DIMENSION),
        elements=st.floats(min_value=-1e3, max_value=1e3),
    )
)
def test_herm_eig_hypothesis(entries):
    G = entries[0] + 1j * entries[1]
    H = (G + adjoint(G)) / 2
    dec = herm_eig(H)
    scale = max(frobenius(H), 1)
    assert unitarity_defect(dec.basis) < 1e-10
    assert frobenius(dec.reconstruct() - H) <= 1e-11 * scale
    assert np.isclose(np.sum(dec.eigenvalues), np.trace(H).real, atol=1e-10 * scale)


class TestSvd:
    def test_against_mpmath(self):
        T = draw(Ensemble.GINIBRE, 4, rng(11))
        np.testing.assert_allclose(
            singular_values(T), _mp_singular_values(T), atol=1e-12
        )

    def test_rectangular(self):
        gen = rng(4)
        T = draw(Ensemble.GINIBRE, 5, gen)[:, :3]
        dec = svd(T)
        assert dec.left.shape == (5, 5)
        assert dec.right.shape == (3, 3)
        assert unitarity_defect(dec.left) < 1e-10
        assert unitarity_defect(dec.right) < 1e-10
        assert frobenius(dec.reconstruct() - T) < 1e-12
        np.testing.assert_allclose(
            dec.singular_values, _mp_singular_values(T), atol=1e-12
        )

    def test_rank_deficient(self):
        T = np.array([[1, 2j, 0], [3, 4, 0], [5, 6j, 0]])
        dec = svd(T)
        assert dec.rank == 2
        assert unitarity_defect(dec.left) < 1e-10
        assert frobenius(dec.reconstruct() - T) < 1e-12
        x, y = np.array([1, 2j, 3]), np.array([1, 0, 1j])
        T = np.outer(x, y.conj())
        dec = svd(T)
        assert dec.rank == 1
        assert dec.singular_values[0] == pytest.approx(np.sqrt(28))
        assert unitarity_defect(dec.left) < 1e-10
        assert frobenius(dec.reconstruct() - T) < 1e-12

    def test_hermitian_fast_path(self):
        H = np.diag([-3.0, 1.0, 2.0])
        dec = svd(H)
        np.testing.assert_allclose(dec.singular_values, [3, 2, 1])
        assert frobenius(dec.reconstruct() - H) < 1e-14

    def test_nilpotent(self):
        T = np.diag([1.0, 1.0], k=1)
        np.testing.assert_allclose(singular_values(T), [1, 1, 0], atol=1e-15)

    def test_zero(self):
        dec = svd(np.zeros((2, 2)))
        np.testing.assert_allclose(dec.singular_values, [0, 0])
        assert unitarity_defect(dec.left) < 1e-14


class TestFunctionalCalculus:
    def test_sqrt(self):
        np.testing.assert_allclose(
            apply_fn(np.diag([0, 1, 4]), np.sqrt).real, np.diag([0, 1, 2])
        )

    def test_not_psd(self):
        with pytest.raises(NotPsd) as info:
            apply_fn(np.diag([1.0, -1.0]), np.sqrt)
        assert info.value.lam_min == pytest.approx(-1)

    def test_clamps_roundoff(self):
        A = np.diag([1.0, -1e-15])
        np.testing.assert_allclose(apply_fn(A, np.sqrt).real, np.diag([1.0, 0.0]))

    def test_result_is_hermitian(self):
        A = draw(Ensemble.PSD, 5, rng(8))
        R = apply_fn(A, np.sqrt)
        assert np.array_equal(R, adjoint(R))

    def test_composition(self):
        # sqrt(sqrt(A)) = A^(1/4)
        A = draw(Ensemble.PSD, 4, rng(9))
        nested = apply_fn(apply_fn(A, np.sqrt), np.sqrt)
        direct = apply_fn(A, lambda lam: lam**0.25)
        assert frobenius(nested - direct) < 1e-10


class TestPolar:
    def test_nilpotent(self):
        T = np.diag([1.0, 1.0], k=1)
        parts = polar_parts(T)
        np.testing.assert_allclose(parts.abs_t, np.diag([0, 1, 1]), atol=1e-15)
        np.testing.assert_allclose(parts.abs_tstar, np.diag([1, 1, 0]), atol=1e-15)
        np.testing.assert_allclose(parts.reconstruct(), T, atol=1e-15)

    def test_abs_squared(self):
        T = draw(Ensemble.GINIBRE, 4, rng(21))
        A = abs_matrix(T)
        assert frobenius(A @ A - adjoint(T) @ T) < 1e-12
        assert is_psd(A)

    def test_abs_of_hermitian(self):
        H = np.array([[0, 1], [1, 0]], dtype=complex)
        np.testing.assert_allclose(abs_matrix(H), np.eye(2), atol=1e-14)

    def test_normal(self):
        N = draw(Ensemble.NORMAL, 4, rng(6))
        parts = polar_parts(N)
        assert frobenius(parts.abs_t - parts.abs_tstar) < 1e-12

    def test_cartesian_parts_are_hermitian(self):
        parts = polar_parts(draw(Ensemble.GINIBRE, 3, rng(13)))
        assert is_hermitian(parts.re_t)
        assert is_hermitian(parts.im_t)

    @pytest.mark.parametrize("seed", range(5))
    def test_abs_spectrum_is_sigma(self, seed):
        T = draw(Ensemble.GINIBRE, 4, rng(60 + seed))
        np.testing.assert_allclose(
            herm_eig(abs_matrix(T)).eigenvalues,
            svd(T).singular_values,
            atol=1e-12,
        )

    def test_not_square(self):
        with pytest.raises(NotSquare):
            polar_parts(np.ones((2, 3)))


class TestPsd:
    def test_certificate(self):
        cert = is_psd(np.diag([2.0, -0.5]))
        assert not cert
        assert cert.lam_min == pytest.approx(-0.5)
        np.testing.assert_allclose(np.abs(cert.vector), [0, 1])
        assert is_psd(np.eye(3))

    def test_boundary(self):
        assert is_psd(np.diag([1.0, -DEFAULT_TOL.bound(1) / 2]))
        assert not is_psd(np.diag([1.0, -2 * DEFAULT_TOL.bound(1)]))

    def test_loewner(self):
        A = draw(Ensemble.PSD, 3, rng(1))
        B = A + draw(Ensemble.PSD, 3, rng(2))
        assert loewner_leq(A, B)
        assert loewner_leq(A, A)
        assert not loewner_leq(B + np.eye(3), A)

    @pytest.mark.parametrize("kind", [Ensemble.PSD, Ensemble.HERMITIAN])
    def test_unitary_invariance(self, kind):
        gen = rng(70)
        for _ in range(5):
            H = draw(kind, 4, gen)
            U = draw(Ensemble.UNITARY, 4, gen)
            conjugated = U @ H @ adjoint(U)
            conjugated = (conjugated + adjoint(conjugated)) / 2
            before, after = is_psd(H), is_psd(conjugated)
            assert before.holds == after.holds
            assert after.lam_min == pytest.approx(before.lam_min, abs=1e-12)

    def test_loewner_shapes(self):
        with pytest.raises(ShapeMismatch):
            loewner_leq(np.eye(2), np.eye(3))
        with pytest.raises(MatrixError):
            loewner_leq(np.array([[0, 1], [0, 0]]), np.eye(2))

    def test_lambda_min(self):
        assert lambda_min(np.diag([3.0, -2.0, 1.0])) == pytest.approx(-2)


def test_as_cmatrix():
    M = as_cmatrix([[1, 2], [3, 4]])
    assert M.dtype == np.complex128
    with pytest.raises(ShapeMismatch):
        as_cmatrix(np.zeros((0, 2)))
