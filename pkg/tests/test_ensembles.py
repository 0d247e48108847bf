import numpy as np
import pytest

from matrixcs.linalg import adjoint, frobenius, singular_values, unitarity_defect
from matrixcs.ensembles import (
    PD_SHIFT,
    Ensemble,
    EnsembleSpec,
    rng,
    draw,
    rng_for,
    trial_seed,
)


class TestSeeds:
    def test_trial_seed_is_deterministic(self):
        assert trial_seed(42, "check_lieb_cs", 3, 7) == trial_seed(
            42, "check_lieb_cs", 3, 7
        )

    def test_trial_seed_depends_on_every_key(self):
        base = trial_seed(42, "check_lieb_cs", 3, 7)
        others = {
            trial_seed(43, "check_lieb_cs", 3, 7),
            trial_seed(42, "check_sum_cs", 3, 7),
            trial_seed(42, "check_lieb_cs", 4, 7),
            trial_seed(42, "check_lieb_cs", 3, 8),
        }
        assert base not in others
        assert len(others) == 4

    def test_trial_seed_is_64_bit(self):
        seed = trial_seed(2**64 - 1, "check_gather", 16, 999)
        assert 0 <= seed < 2**64

    def test_rng_for(self):
        gen, seed = rng_for(1, "check_gather", 2, 0)
        assert seed == trial_seed(1, "check_gather", 2, 0)
        expected = rng(seed).standard_normal(4)
        np.testing.assert_array_equal(gen.standard_normal(4), expected)

    def test_streams_are_reproducible(self):
        first = draw(Ensemble.GINIBRE, 4, rng(9))
        second = draw(Ensemble.GINIBRE, 4, rng(9))
        np.testing.assert_array_equal(first, second)


class TestEnsembles:
    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_hermitian(self, n):
        H = draw(Ensemble.HERMITIAN, n, rng(n))
        np.testing.assert_array_equal(H, adjoint(H))

    def test_psd(self):
        A = draw(Ensemble.PSD, 5, rng(1))
        assert np.linalg.eigvalsh(A)[0] >= -1e-14

    def test_pd(self):
        for seed in range(10):
            A = draw(Ensemble.PD, 4, rng(seed))
            assert np.linalg.eigvalsh(A)[0] >= PD_SHIFT - 1e-14

    def test_unitary(self):
        U = draw(Ensemble.UNITARY, 6, rng(3))
        assert unitarity_defect(U) < 1e-13

    def test_normal(self):
        N = draw(Ensemble.NORMAL, 4, rng(4))
        assert frobenius(N @ adjoint(N) - adjoint(N) @ N) < 1e-12

    def test_contraction(self):
        for seed in range(5):
            K = draw(Ensemble.CONTRACTION, 3, rng(seed))
            assert singular_values(K)[0] <= 1 + 1e-12

    def test_vector(self):
        x = draw("vector", 5, rng(6))
        assert x.shape == (5,)
        assert np.linalg.norm(x) == pytest.approx(1)

    def test_unknown(self):
        with pytest.raises(ValueError):
            draw("wishart", 3, rng(0))


def test_ensemble_spec():
    spec = EnsembleSpec(Ensemble.GINIBRE, 3, trial_seed(5, "check_lemma04", 3, 0))
    np.testing.assert_array_equal(spec.draw(), spec.draw())
    assert spec.draw().shape == (3, 3)
