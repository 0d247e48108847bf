#!/usr/bin/env python

import sys
import pickle
from pathlib import Path
from time import process_time

import click
import numpy as np

from matrixcs.logging import getLogger
from matrixcs.checks import CHECKS
from matrixcs.verify import RunConfig, run_corpus


# ---------------USAGE----------------
# COMMAND FOR TIMING EVERY CHECK AT SIZES 2 THROUGH 8:
# tests/bench_corpus.py --name 'jacobi' --reps 3 --trials 5 --archive archive.pickle \
# --intervals-dims 2 9 1 -o bench-corpus.tsv


def progressbar(it, prefix="", size=60, out=sys.stdout):
    count = len(it)

    def show(j):
        x = int(size * j / count)
        print(
            f"{prefix}[{u'█'*x}{('.'*(size-x))}] {j}/{count}",
            end="\r",
            file=out,
            flush=True,
        )

    show(0)
    for i, item in enumerate(it):
        yield item
        show(i + 1)
    print("\n", flush=True, file=out)


def time_check(check_id: str, dim: int, trials: int, reps: int, log) -> float:
    config = RunConfig(
        seed=0, trials=trials, dims=(dim,), checks=(check_id,), functionals="det,per"
    )
    times = np.empty(reps, dtype=np.float64)
    for rep in range(reps):
        start = process_time()
        run_corpus(config, log)
        times[rep] = process_time() - start
    return times.mean() / trials


@click.command()
@click.option(
    "--intervals-dims",
    type=int,
    nargs=3,
    default=(2, 5, 1),
    show_default=True,
    help="The start, end, and step values of the matrix sizes to time",
)
@click.option(
    "-c",
    "--checks",
    type=str,
    default="all",
    show_default=True,
    help="A comma-separated list of the checks to time",
)
@click.option(
    "--trials",
    type=int,
    default=3,
    show_default=True,
    help="The number of trials per timing",
)
@click.option(
    "--reps",
    type=int,
    default=3,
    show_default=True,
    help="For each size, we take the mean of --reps X replicates",
)
@click.option(
    "-o",
    "--output",
    type=click.Path(path_type=Path),
    default=Path("bench-corpus.tsv"),
    show_default=True,
    help="A TSV file of the seconds per trial of each check at each size",
)
@click.option(
    "-a",
    "--archive",
    type=click.Path(path_type=Path),
    default=None,
    show_default="do not load generated results",
    help="A python pickle file into which to store results",
)
@click.option(
    "-n",
    "--name",
    type=str,
    default="default",
    show_default=True,
    help="A unique name for the result when it gets saved in the pickle file",
)
@click.option(
    "--skip-bench",
    is_flag=True,
    default=False,
    show_default=True,
    help="Load directly from the archive instead of benchmarking",
)
def main(intervals_dims, checks, trials, reps, output, archive, name, skip_bench):
    """
    Benchmarks run_corpus() for each check in the checks module
    """
    dims = range(*intervals_dims)
    check_ids = tuple(CHECKS) if checks == "all" else tuple(checks.split(","))
    log = getLogger("bench", "ERROR")

    # loading results
    results = {}
    if archive is not None and archive.exists():
        with open(archive, "rb") as fh:
            results.update(pickle.load(fh))
        print(f"Loaded items from pickle: {tuple(results.keys())}", file=sys.stderr)

    if not skip_bench:
        results[name] = {}
        for check_id in check_ids:
            results[name][check_id] = [
                time_check(check_id, dim, trials, reps, log)
                for dim in progressbar(dims, prefix=f"{check_id}: ", out=sys.stderr)
            ]
        if archive is not None:
            with open(archive, "wb") as fh:
                pickle.dump(results, fh)

    print("Writing a table of results", file=sys.stderr)
    with open(output, "w") as out:
        out.write("\t".join(["name", "check"] + [f"n={dim}" for dim in dims]) + "\n")
        for result_name, timings in results.items():
            for check_id, times in timings.items():
                row = [result_name, check_id] + [f"{t:.3e}" for t in times]
                out.write("\t".join(row) + "\n")


def test_bench_corpus():
    tmp_table = Path("bench-corpus-test.tsv")

    try:
        main(["-c", "check_gather,check_thm12", "-o", str(tmp_table), "--reps", "1"])
    except SystemExit as err:
        # re-raise unless main() finished without an error
        if err.code:
            raise

    assert len(tmp_table.read_text().splitlines()) == 3
    tmp_table.unlink()


if __name__ == "__main__":
    main()
