import json
from pathlib import Path
from itertools import permutations

import numpy as np
import pytest
from mpmath import mp
from click.testing import CliRunner

from matrixcs.__main__ import main
from matrixcs.data import Matrix
from matrixcs.tolerance import Tolerance
from matrixcs.linalg import herm_eig, adjoint
from matrixcs.ensembles import Ensemble, draw, rng
from matrixcs.errors import MatrixError, TooLargeForPermanent, RootFindingFailed
from matrixcs.lieb import (
    NormKind,
    FactorPair,
    LiebFunctional,
    char_poly,
    permanent,
    poly_roots,
    apply_pair,
    determinant,
    check_lieb_axioms,
    elementary_symmetric,
)


DATADIR = Path(__file__).parent.joinpath("data")


def _brute_permanent(A: np.ndarray) -> complex:
    n = A.shape[0]
    return sum(
        np.prod([A[i, sigma[i]] for i in range(n)]) for sigma in permutations(range(n))
    )


class TestDeterminant:
    def test_identity(self):
        assert determinant(np.eye(3)) == 1

    def test_against_numpy(self):
        A = draw(Ensemble.GINIBRE, 6, rng(1))
        assert determinant(A) == pytest.approx(np.linalg.det(A), rel=1e-12)

    def test_singular(self):
        assert determinant(np.array([[1, 2], [2, 4]])) == 0

    def test_pivoting(self):
        assert determinant(np.array([[0, 1], [1, 0]])) == -1


class TestPermanent:
    def test_ones(self):
        assert permanent(np.ones((3, 3))) == 6
        assert permanent(np.ones((5, 5))) == pytest.approx(120)

    def test_against_brute_force(self):
        A = draw(Ensemble.GINIBRE, 5, rng(3))
        assert permanent(A) == pytest.approx(_brute_permanent(A), rel=1e-12)

    def test_one_by_one(self):
        assert permanent(np.array([[2 + 1j]])) == 2 + 1j

    def test_too_large(self):
        with pytest.raises(TooLargeForPermanent):
            permanent(np.eye(13))


class TestCharPoly:
    def test_coefficients(self):
        # det(xI - diag(1, 2, 3)) = x^3 - 6x^2 + 11x - 6
        np.testing.assert_allclose(char_poly(np.diag([1, 2, 3])), [1, -6, 11, -6])

    def test_roots_against_mpmath(self):
        A = draw(Ensemble.GINIBRE, 5, rng(8))
        coeffs = char_poly(A)
        mp.dps = 32
        expected = mp.polyroots(
            [complex(c) for c in coeffs], maxsteps=200, extraprec=64
        )
        roots = poly_roots(coeffs)
        for root in expected:
            assert np.min(np.abs(roots - complex(root))) < 1e-10

    def test_roots_of_eigenvalues(self):
        roots = np.sort_complex(poly_roots(char_poly(np.diag([1.0, 2.0, 3.0]))))
        np.testing.assert_allclose(roots, [1, 2, 3], atol=1e-10)

    def test_degenerate_polynomials(self):
        assert len(poly_roots([2.0])) == 0
        np.testing.assert_allclose(poly_roots([0, 2, -4]), [2])
        with pytest.raises(MatrixError):
            poly_roots([0, 0])

    def test_iteration_cap(self):
        with pytest.raises(RootFindingFailed):
            poly_roots([1, 0, 0, -1], Tolerance(max_root_iter=1))

    def test_zero_roots_are_deflated(self):
        # x^3 (x - 2), where x = 0 is a triple root
        roots = np.sort_complex(poly_roots([1, -2, 0, 0, 0]))
        np.testing.assert_allclose(roots, [0, 0, 0, 2], atol=1e-12)


def test_elementary_symmetric():
    values = [1, 2, 3]
    assert elementary_symmetric(values, 0) == 1
    assert elementary_symmetric(values, 1) == 6
    assert elementary_symmetric(values, 2) == 11
    assert elementary_symmetric(values, 3) == 6


class TestNormKind:
    def test_parse(self):
        assert NormKind.from_name("kyfan2") == NormKind("kyfan", 2)
        assert NormKind.from_name("schatten3") == NormKind("schatten", 3.0)
        assert str(NormKind.from_name("schatten1.5")) == "schatten1.5"
        assert str(NormKind("operator")) == "operator"

    def test_bad_names(self):
        for name in ("nuclear", "kyfan0", "kyfan1.5", "schatten0.5"):
            with pytest.raises(ValueError):
                NormKind.from_name(name)

    def test_values(self):
        M = np.diag([1.0, 2.0, -1.0])
        assert NormKind("operator")(M) == pytest.approx(2)
        assert NormKind("trace")(M) == pytest.approx(4)
        assert NormKind("frobenius")(M) == pytest.approx(np.sqrt(6))
        assert NormKind("kyfan", 2)(np.diag([1.0, 2.0, 1.0])) == pytest.approx(3)
        assert NormKind("schatten", 2)(M) == pytest.approx(np.sqrt(6))

    def test_unitary_invariance(self):
        gen = rng(5)
        M, U = draw(Ensemble.GINIBRE, 4, gen), draw(Ensemble.UNITARY, 4, gen)
        for name in ("operator", "trace", "kyfan2", "schatten3"):
            norm = NormKind.from_name(name)
            assert norm(U @ M) == pytest.approx(norm(M), rel=1e-10)


class TestLiebFunctional:
    def test_from_name(self):
        assert LiebFunctional.from_name("det") == LiebFunctional.det()
        assert LiebFunctional.from_name("e2") == LiebFunctional.elem(2)
        assert LiebFunctional.from_name("trace") == LiebFunctional.norm("trace")
        assert LiebFunctional.from_name("kyfan2").name == "kyfan2"
        with pytest.raises(ValueError):
            LiebFunctional.from_name("e0")
        with pytest.raises(ValueError):
            LiebFunctional.from_name("spread")

    def test_applies_to(self):
        assert not LiebFunctional.elem(3).applies_to(2)
        assert LiebFunctional.elem(2).applies_to(2)
        assert not LiebFunctional.per().applies_to(13)

    @pytest.mark.parametrize("n", [8, 12, 16])
    def test_rho_of_nilpotent(self, n):
        shift = np.diag(np.ones(n - 1), 1)
        assert LiebFunctional.from_name("rho")(shift) == pytest.approx(0, abs=1e-8)
        e2 = LiebFunctional.from_name("e2")(shift)
        assert e2 == pytest.approx(0, abs=1e-8)

    def test_hermitian_and_general_paths_agree(self):
        # a Hermitian matrix plus a tiny skew part leaves the Hermitian path
        H = draw(Ensemble.HERMITIAN, 4, rng(6))
        K = draw(Ensemble.HERMITIAN, 4, rng(7))
        perturbed = H + 1e-6j * K
        for name in ("rho", "e2", "e3"):
            f = LiebFunctional.from_name(name)
            assert f(perturbed) == pytest.approx(f(H), abs=1e-4)

    def test_elementary_symmetric_values(self):
        A = draw(Ensemble.GINIBRE, 4, rng(2))
        eigenvalues = np.linalg.eigvals(A)
        for k in range(1, 5):
            f = LiebFunctional.elem(k)
            assert f(A) == pytest.approx(
                elementary_symmetric(eigenvalues, k), rel=1e-9, abs=1e-12
            )
        assert LiebFunctional.elem(4)(A) == pytest.approx(determinant(A), rel=1e-9)

    def test_rho(self):
        assert LiebFunctional.rho()(np.diag([1.0, -3.0])) == pytest.approx(3)
        # a nilpotent matrix has spectral radius zero
        T = np.diag([1.0, 1.0], k=1)
        assert abs(LiebFunctional.rho()(T)) < 1e-6

    def test_elem_too_large(self):
        with pytest.raises(MatrixError):
            LiebFunctional.elem(3)(np.eye(2))


class TestFactorPair:
    def test_from_name(self):
        assert FactorPair.from_name("sqrt").name == "sqrt"
        assert FactorPair.from_name("power:0.25") == FactorPair.power(0.25)
        with pytest.raises(ValueError):
            FactorPair.from_name("power:1.5")
        with pytest.raises(ValueError):
            FactorPair.from_name("log")

    def test_swapped(self):
        assert FactorPair.power(0.25).swapped() == FactorPair.power(0.75)
        assert FactorPair.sqrt().swapped() == FactorPair.sqrt()

    def test_validate(self):
        FactorPair.power(0.3).validate(lam_max=1e3)
        with pytest.raises(ValueError):
            FactorPair.custom(np.sqrt, lambda t: t)
        with pytest.raises(ValueError):
            FactorPair.custom(lambda t: -np.sqrt(t), lambda t: -np.sqrt(t))

    def test_squares(self):
        A = draw(Ensemble.PSD, 4, rng(3))
        for pair in (FactorPair.sqrt(), FactorPair.power(0.25)):
            g2, h2 = apply_pair(pair, A)
            # g^2(A) h^2(A) = A^2 since g^2 and h^2 commute
            np.testing.assert_allclose(g2 @ h2, A @ A, atol=1e-12)

    def test_power_endpoints(self):
        A = draw(Ensemble.PSD, 3, rng(4))
        g2, h2 = apply_pair(FactorPair.power(1), A)
        np.testing.assert_allclose(g2, A @ A, atol=1e-12)
        np.testing.assert_allclose(h2, np.eye(3), atol=1e-12)

    def test_squares_reuse_decomposition(self):
        A = draw(Ensemble.PSD, 3, rng(9))
        dec = herm_eig(A)
        g2, h2 = FactorPair.sqrt().squares(dec)
        np.testing.assert_allclose(g2, A, atol=1e-12)
        np.testing.assert_allclose(h2, adjoint(A), atol=1e-12)


class TestLiebAxioms:
    @pytest.mark.parametrize(
        "name", ["det", "per", "rho", "e2", "trace", "operator", "kyfan2", "schatten3"]
    )
    def test_canonical_family(self, name):
        outcomes = check_lieb_axioms(
            LiebFunctional.from_name(name), trials=5, dims=[2, 3], seed=42
        )
        assert len(outcomes) == 30
        assert all(outcome.passed for outcome in outcomes)
        assert {outcome.variant for outcome in outcomes} == {"monotone", "cs", "block"}

    def test_skips_dimensions(self):
        outcomes = check_lieb_axioms(LiebFunctional.elem(3), 2, [2, 3], seed=1)
        assert {outcome.dim for outcome in outcomes} == {3}

    def test_deterministic(self):
        f = LiebFunctional.det()
        first = check_lieb_axioms(f, 3, [2], seed=11)
        second = check_lieb_axioms(f, 3, [2], seed=11)
        assert first == second

    def test_needs_trials(self):
        with pytest.raises(ValueError):
            check_lieb_axioms(LiebFunctional.det(), 0, [2], seed=1)


def _eval(cmd: str):
    runner = CliRunner()
    result = runner.invoke(main, ["eval"] + cmd.split(" "), catch_exceptions=False)
    lines = [line.split(": ", 1) for line in result.output.splitlines()]
    return result.exit_code, {line[0]: line[1] for line in lines if len(line) == 2}


def test_eval_cli(capfd):
    code, values = _eval(f"--det --per --kyfan 2 -v ERROR {DATADIR / 'identity3.json'}")
    assert code == 0
    assert float(values["det"]) == pytest.approx(1)
    assert float(values["per"]) == pytest.approx(1)
    assert float(values["kyfan2"]) == pytest.approx(2)


def test_eval_cli_kyfan_abs_sum(capfd):
    # |T| + |T*| for the nilpotent example
    code, values = _eval(f"--kyfan 2 -v ERROR {DATADIR / 'abs_sum3.json'}")
    assert code == 0
    assert float(values["kyfan2"]) == pytest.approx(3)


def test_eval_cli_polar(capfd):
    code, values = _eval(f"--polar --rho -v ERROR {DATADIR / 'nilpotent3.json'}")
    assert code == 0
    assert abs(float(values["rho"])) <= 1e-6
    abs_t = Matrix.decode(json.loads(values["abs_t"]))
    np.testing.assert_allclose(abs_t, np.diag([0, 1, 1]), atol=1e-12)


def test_eval_cli_gm(capfd):
    files = f"{DATADIR / 'a2.json'} {DATADIR / 'b2.json'}"
    code, values = _eval(f"--gm -v ERROR {files}")
    assert code == 0
    gm = Matrix.decode(json.loads(values["gm"]))
    np.testing.assert_allclose(gm, 4 * np.eye(2), atol=1e-12)

    code, values = _eval(f"--wgm 0 -v ERROR {files}")
    wgm = Matrix.decode(json.loads(values["wgm"]))
    np.testing.assert_allclose(wgm, np.diag([2, 8]), atol=1e-12)


def test_eval_cli_not_pd(capfd):
    files = f"{DATADIR / 'a2.json'} {DATADIR / 'indefinite2.json'}"
    code, values = _eval(f"--gm -v ERROR {files}")
    assert code == 4
    assert float(values["lambda_min"]) == pytest.approx(-1)


@pytest.mark.parametrize(
    "args",
    [
        "identity3.json",
        "--gm identity3.json",
        "--det identity3.json a2.json",
        "--gm --det a2.json b2.json",
        "--kyfan 0 identity3.json",
        "--det rect2x3.json",
    ],
)
def test_eval_cli_usage(args, capfd):
    args = [arg if arg.startswith("-") else str(DATADIR / arg) for arg in args.split()]
    runner = CliRunner()
    result = runner.invoke(main, ["eval"] + args)
    assert result.exit_code == 2
