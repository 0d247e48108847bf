#!/usr/bin/env python

from __future__ import annotations
import sys
from pathlib import Path

import click

# AVOID IMPORTING ANYTHING ABOVE
# any imports we put here will make it slower to use the command line client
# a basic "matrixcs --help" should be quick and require very few imports


VERBOSITY = click.Choice(["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG", "NOTSET"])


def _precondition_failed(err: Exception, log) -> int:
    """
    Report a matrix that fails a precondition and choose the exit code
    """
    lam_min = getattr(err, "lam_min", None)
    if lam_min is not None:
        click.echo(f"lambda_min: {lam_min!r}")
    log.error(str(err))
    return 4


def _exit_code(err: Exception, log) -> int:
    from .errors import NotPsd, NotSquare, NotHermitian, ShapeMismatch
    from .errors import NotPositiveDefinite, TooLargeForPermanent

    if isinstance(err, (NotSquare, ShapeMismatch)):
        raise click.UsageError(str(err))
    if isinstance(
        err, (NotPsd, NotPositiveDefinite, NotHermitian, TooLargeForPermanent)
    ):
        return _precondition_failed(err, log)
    # solver failures
    log.error(f"{type(err).__name__}: {err}")
    return 3


def _load(path: Path, log):
    from .data import Matrix

    try:
        matrix = Matrix(path, log=log)
        matrix.read()
    except ValueError as err:
        raise click.BadParameter(str(err), param_hint=str(path))
    return matrix.data


def _format(value) -> str:
    """
    Shortest round-trip text for a number, dropping a negligible imaginary part
    """
    value = complex(value)
    if abs(value.imag) <= 1e-12 * max(1.0, abs(value)):
        return repr(value.real)
    return repr(value)


def _format_matrix(arr) -> str:
    import json
    from .data import Matrix

    return json.dumps(Matrix.encode(arr))


################### matrixcs ##################
@click.group()
@click.version_option(message="%(version)s")
def main():
    """
    matrixcs: Numerical verification of matrix Cauchy-Schwarz inequalities for
    Lieb functions
    """
    pass


@main.command()
@click.option(
    "--seed",
    type=click.IntRange(min=0, max=2**64 - 1),
    default=42,
    show_default=True,
    help="The master seed. Each trial derives its own seed from it",
)
@click.option(
    "-n",
    "--trials",
    type=click.IntRange(min=1),
    default=100,
    show_default=True,
    help="The number of trials of each check at each dimension",
)
@click.option(
    "-d",
    "--dims",
    type=str,
    default="2,3",
    show_default=True,
    help="A comma-separated list of matrix sizes between 2 and 16",
)
@click.option(
    "-c",
    "--checks",
    type=str,
    default="all",
    show_default=True,
    help="A comma-separated list of check names, or 'all'",
)
@click.option(
    "-f",
    "--functionals",
    type=str,
    default=None,
    show_default="det,per,rho,e2,frobenius,trace,operator,kyfan2,schatten3",
    help=(
        "A comma-separated list of Lieb functionals: det, per, rho, e<k>, operator, "
        "trace, frobenius, kyfan<k>, schatten<p>"
    ),
)
@click.option(
    "-p",
    "--pairs",
    type=str,
    default=None,
    show_default="sqrt,power:0.25,power:0.5,power:0.75",
    help="A comma-separated list of factor pairs: sqrt or power:<v> with v in [0, 1]",
)
@click.option(
    "--tol-abs",
    type=float,
    default=1e-12,
    show_default=True,
    help="The absolute slack allowed in every comparison",
)
@click.option(
    "--tol-rel",
    type=float,
    default=1e-8,
    show_default=True,
    help="The relative slack, scaled by max(1, |rhs|)",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(path_type=Path),
    default=Path("-"),
    show_default="stdout",
    help="A JSON or CSV report of every outcome; a .gz suffix compresses it",
)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "csv"]),
    default=None,
    show_default="inferred from --output, or json",
    help="The format of the report",
)
@click.option(
    "--metadata",
    is_flag=True,
    default=False,
    show_default=True,
    help="Add the version and creation time to JSON reports",
)
@click.option(
    "-t",
    "--threads",
    type=click.IntRange(min=1),
    default=1,
    envvar="MATRIXCS_THREADS",
    show_default=True,
    help="The number of worker threads. This never changes the report",
)
@click.option(
    "-v",
    "--verbosity",
    type=VERBOSITY,
    default="INFO",
    show_default=True,
    help="The level of verbosity desired",
)
def verify(
    seed: int = 42,
    trials: int = 100,
    dims: str = "2,3",
    checks: str = "all",
    functionals: str = None,
    pairs: str = None,
    tol_abs: float = 1e-12,
    tol_rel: float = 1e-8,
    output: Path = Path("-"),
    fmt: str = None,
    metadata: bool = False,
    threads: int = 1,
    verbosity: str = "INFO",
):
    """
    Run the verification corpus over seeded random matrices

    Exits with 0 if every outcome passed, 1 if any failed, and 3 if any were
    inconclusive
    """
    from .data import Report
    from .logging import getLogger
    from .verify import RunConfig, verify as run_verify

    log = getLogger(name="verify", level=verbosity)

    settings = {}
    if functionals is not None:
        settings["functionals"] = functionals
    if pairs is not None:
        settings["pairs"] = pairs
    try:
        dims = tuple(int(dim) for dim in dims.split(",") if dim.strip())
        config = RunConfig(
            seed=seed,
            trials=trials,
            dims=dims,
            tol_abs=tol_abs,
            tol_rel=tol_rel,
            checks=checks,
            output=output,
            fmt=fmt or Report.infer_format(output),
            threads=threads,
            metadata=metadata,
            **settings,
        )
    except ValueError as err:
        raise click.UsageError(str(err))

    sys.exit(int(run_verify(config, log)))


@main.command()
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Also write T, |T| + |T*|, T + T*, and the witness vector as matrix JSON",
)
@click.option(
    "--search",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="Also look for violations among this many random Ginibre matrices",
)
@click.option(
    "--search-dim",
    type=click.IntRange(min=2),
    default=2,
    show_default=True,
    help="The size of the random matrices tried by --search",
)
@click.option(
    "--seed",
    type=click.IntRange(min=0, max=2**64 - 1),
    default=42,
    show_default=True,
    help="The master seed of --search",
)
@click.option(
    "-v",
    "--verbosity",
    type=VERBOSITY,
    default="INFO",
    show_default=True,
    help="The level of verbosity desired",
)
def counterexample(
    out_dir: Path = None,
    search: int = 0,
    search_dim: int = 2,
    seed: int = 42,
    verbosity: str = "INFO",
):
    """
    Show that |T + T*| <= |T| + |T*| fails for the 3 x 3 nilpotent T

    Exits with 0 if the violation is confirmed
    """
    from .data import Matrix
    from .logging import getLogger
    from .checks import counterexample_details, reproduce_counterexample
    from .checks import search_counterexample

    log = getLogger(name="counterexample", level=verbosity)

    details = counterexample_details()
    outcome = reproduce_counterexample()
    matrices = {
        "T": details.T,
        "abs_sum": details.abs_sum,
        "re_sum": details.re_sum,
        "witness": details.witness,
    }
    for name, arr in matrices.items():
        click.echo(f"{name}: {_format_matrix(arr)}")
    for name, sigma in (
        ("sigma_abs_sum", details.sigma_abs_sum),
        ("sigma_re_sum", details.sigma_re_sum),
    ):
        click.echo(f"{name}: " + ", ".join(_format(val) for val in sigma))
    click.echo(f"lambda_min: {_format(details.lam_min)}")

    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, arr in matrices.items():
            Matrix.from_array(out_dir / f"{name}.json", arr, log=log).write()
        log.info(f"Wrote the counterexample to {out_dir}")

    if search:
        result = search_counterexample(search_dim, search, seed)
        log.info(
            f"Found {result.violations} violations among {result.draws} random "
            f"{search_dim}x{search_dim} matrices; the smallest lambda_min was "
            f"{result.worst_lam_min:.3e} (seed {result.worst_seed})"
        )

    if not outcome.passed:
        log.error(f"The violation was not confirmed: {outcome.note}")
        sys.exit(1)
    log.info("Confirmed that |Re T| <= (|T| + |T*|)/2 fails")


@main.command()
@click.argument("matrix", type=click.Path(exists=True, path_type=Path))
@click.option(
    "--n",
    "top",
    type=click.IntRange(min=1),
    default=None,
    show_default="half of the matrix",
    help="The size of the top-left block",
)
@click.option(
    "--m",
    "bottom",
    type=click.IntRange(min=1),
    default=None,
    show_default="the rest of the matrix",
    help="The size of the bottom-right block",
)
@click.option(
    "--pair",
    type=str,
    default="sqrt",
    show_default=True,
    help="The factor pair used with --from-matrix: sqrt or power:<v>",
)
@click.option(
    "--from-matrix",
    is_flag=True,
    default=False,
    show_default=True,
    help=(
        "Treat MATRIX as a square T and decompose [[g^2(|T|), T*], [T, h^2(|T*|)]] "
        "into pieces built from S + Re T and S - Re T"
    ),
)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    show_default="the current directory",
    help="Where to write u.json, v.json, top.json, and bottom.json",
)
@click.option(
    "-v",
    "--verbosity",
    type=VERBOSITY,
    default="INFO",
    show_default=True,
    help="The level of verbosity desired",
)
def decompose(
    matrix: Path,
    top: int = None,
    bottom: int = None,
    pair: str = "sqrt",
    from_matrix: bool = False,
    out_dir: Path = Path("."),
    verbosity: str = "INFO",
):
    """
    Write a PSD block matrix as u diag(A, O) u* + v diag(O, B) v*

    MATRIX must be a matrix JSON file. Exits with 4 if it is not PSD.
    """
    from .data import Matrix
    from .lieb import FactorPair
    from .logging import getLogger
    from .linalg import frobenius
    from .tolerance import DEFAULT_TOL
    from .errors import MatrixError, NotPsd
    from .blocks import Block2x2, pinch_decompose, remark13_decompose

    log = getLogger(name="decompose", level=verbosity)

    M = _load(matrix, log)
    try:
        pair = FactorPair.from_name(pair)
    except ValueError as err:
        raise click.BadParameter(str(err), param_hint="--pair")

    try:
        if from_matrix:
            pinch = remark13_decompose(M, pair, log=log)
        else:
            size = M.shape[0]
            top = top or (size - bottom if bottom else size // 2)
            if bottom is not None and top + bottom != size:
                raise click.UsageError(f"--n and --m must add up to {size}")
            block = Block2x2.from_matrix(M, top)
            cert = block.certify()
            if not cert:
                raise NotPsd(
                    f"{matrix} is not PSD: lambda_min = {cert.lam_min:.3e}",
                    cert.lam_min,
                )
            pinch = pinch_decompose(block, log=log)
    except MatrixError as err:
        sys.exit(_exit_code(err, log))

    out_dir.mkdir(parents=True, exist_ok=True)
    for name in ("u", "v", "top", "bottom"):
        Matrix.from_array(out_dir / f"{name}.json", getattr(pinch, name), log).write()
    residual = pinch.residual()
    click.echo(f"residual: {residual!r}")
    if residual > DEFAULT_TOL.bound(frobenius(pinch.source)):
        log.error("The decomposition does not reconstruct the matrix")
        sys.exit(1)


@main.command(name="eval")
@click.argument(
    "matrices", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path)
)
@click.option("--det", is_flag=True, default=False, help="The determinant")
@click.option("--per", is_flag=True, default=False, help="The permanent (n <= 12)")
@click.option("--rho", is_flag=True, default=False, help="The spectral radius")
@click.option(
    "--elem",
    type=click.IntRange(min=1),
    default=None,
    help="The elementary symmetric function e_k of the eigenvalues",
)
@click.option(
    "--kyfan", type=click.IntRange(min=1), default=None, help="The Ky Fan k-norm"
)
@click.option(
    "--schatten",
    type=click.FloatRange(min=1),
    default=None,
    help="The Schatten p-norm",
)
@click.option(
    "--norm",
    type=click.Choice(["operator", "trace", "frobenius"]),
    default=None,
    help="One of the other unitarily invariant norms",
)
@click.option(
    "--gm", is_flag=True, default=False, help="The geometric mean A # B of two files"
)
@click.option(
    "--wgm",
    type=click.FloatRange(min=0, max=1),
    default=None,
    help="The weighted geometric mean A #_t B of two files",
)
@click.option(
    "--polar", is_flag=True, default=False, help="The matrices |T|, |T*|, Re T, Im T"
)
@click.option(
    "-v",
    "--verbosity",
    type=VERBOSITY,
    default="INFO",
    show_default=True,
    help="The level of verbosity desired",
)
def evaluate(
    matrices: tuple[Path],
    det: bool = False,
    per: bool = False,
    rho: bool = False,
    elem: int = None,
    kyfan: int = None,
    schatten: float = None,
    norm: str = None,
    gm: bool = False,
    wgm: float = None,
    polar: bool = False,
    verbosity: str = "INFO",
):
    """
    Evaluate Lieb functionals, norms, and means of matrices in matrix JSON files

    Each result is printed on its own line as "name: value", where matrices are
    printed in the matrix JSON format. The means need exactly two files and
    everything else exactly one.
    """
    from .logging import getLogger
    from .errors import MatrixError
    from .linalg import polar_parts
    from .lieb import LiebFunctional, NormKind
    from .means import WeightedMeanQuery, weighted_geom_mean

    log = getLogger(name="eval", level=verbosity)

    functionals = []
    if det:
        functionals.append(LiebFunctional.det())
    if per:
        functionals.append(LiebFunctional.per())
    if rho:
        functionals.append(LiebFunctional.rho())
    if elem is not None:
        functionals.append(LiebFunctional.elem(elem))
    if kyfan is not None:
        functionals.append(LiebFunctional.norm(NormKind("kyfan", kyfan)))
    if schatten is not None:
        functionals.append(LiebFunctional.norm(NormKind("schatten", schatten)))
    if norm is not None:
        functionals.append(LiebFunctional.norm(norm))
    means = gm or wgm is not None
    if not (functionals or means or polar):
        raise click.UsageError("Choose at least one quantity to evaluate")
    if means and (functionals or polar):
        raise click.UsageError("The means cannot be combined with other quantities")
    expected = 2 if means else 1
    if len(matrices) != expected:
        raise click.UsageError(f"Expected {expected} matrix files, not {len(matrices)}")

    arrs = [_load(path, log) for path in matrices]
    try:
        for f in functionals:
            click.echo(f"{f.name}: {_format(f(arrs[0]))}")
        if polar:
            parts = polar_parts(arrs[0])
            for name in ("abs_t", "abs_tstar", "re_t", "im_t"):
                click.echo(f"{name}: {_format_matrix(getattr(parts, name))}")
        if gm:
            mean = weighted_geom_mean(WeightedMeanQuery(*arrs), log=log)
            click.echo(f"gm: {_format_matrix(mean)}")
        if wgm is not None:
            mean = weighted_geom_mean(WeightedMeanQuery(*arrs, wgm), log=log)
            click.echo(f"wgm: {_format_matrix(mean)}")
    except MatrixError as err:
        sys.exit(_exit_code(err, log))


if __name__ == "__main__":
    # run the CLI if someone tries 'python -m matrixcs' on the command line
    main(prog_name="matrixcs")
