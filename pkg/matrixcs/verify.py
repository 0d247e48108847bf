"""
Run the verification corpus and write its report
"""

from __future__ import annotations
import logging
from enum import IntEnum
from pathlib import Path
from functools import partial
from itertools import product
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .data import Report, CheckOutcome, FAIL, INCONCLUSIVE
from .checks import CHECKS, run_trial
from .tolerance import Tolerance
from .lieb import LiebFunctional, FactorPair


DEFAULT_FUNCTIONALS = (
    "det",
    "per",
    "rho",
    "e2",
    "frobenius",
    "trace",
    "operator",
    "kyfan2",
    "schatten3",
)
DEFAULT_PAIRS = ("sqrt", "power:0.25", "power:0.5", "power:0.75")
MIN_DIM, MAX_DIM = 2, 16


class ExitCode(IntEnum):
    PASS = 0
    FAIL = 1
    USAGE = 2
    INCONCLUSIVE = 3
    PRECONDITION = 4


class ConfigError(ValueError):
    """
    A run configuration that cannot be carried out
    """

    pass


def _names(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = value.split(",")
    return tuple(name.strip() for name in value if name.strip())


@dataclass(frozen=True)
class RunConfig:
    """
    The settings of one verification run

    Every field is validated on construction, so that a bad configuration is
    rejected before any trial runs.

    Attributes
    ----------
    seed: int
        The master seed, an unsigned 64-bit integer
    trials: int
        The number of trials of each check at each dimension
    dims: tuple[int, ...]
        The matrix sizes, each in [2, 16]
    tol_abs: float
        The absolute slack of the pass rule
    tol_rel: float
        The relative slack of the pass rule
    checks: tuple[str, ...]
        The names of the checks to run, or ("all",)
    functionals: tuple[str, ...]
        The names of the Lieb functionals and norms to test
    pairs: tuple[str, ...]
        The names of the factor pairs to test
    output: Path, optional
        Where to write the report; "-" means stdout
    fmt: str
        Either "json" or "csv"
    threads: int
        The number of worker threads. It never affects the report.
    metadata: bool
        Whether to add the version and creation time to JSON reports
    """

    seed: int = 42
    trials: int = 100
    dims: tuple[int, ...] = (2, 3)
    tol_abs: float = 1e-12
    tol_rel: float = 1e-8
    checks: tuple[str, ...] = ("all",)
    functionals: tuple[str, ...] = DEFAULT_FUNCTIONALS
    pairs: tuple[str, ...] = DEFAULT_PAIRS
    output: Path = None
    fmt: str = "json"
    threads: int = 1
    metadata: bool = False
    _functionals: tuple = field(init=False, repr=False, compare=False)
    _pairs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = partial(object.__setattr__, self)
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"Seeds must be unsigned 64-bit ints, not {self.seed}")
        if self.trials < 1:
            raise ConfigError("At least one trial is required")
        dims = tuple(int(dim) for dim in self.dims)
        if not dims:
            raise ConfigError("At least one dimension is required")
        bad = [dim for dim in dims if not MIN_DIM <= dim <= MAX_DIM]
        if bad:
            raise ConfigError(f"Dims must lie in [{MIN_DIM}, {MAX_DIM}], not {bad}")
        set_("dims", dims)
        if self.tol_abs <= 0 or self.tol_rel <= 0:
            raise ConfigError("Tolerances must be positive")
        if self.threads < 1:
            raise ConfigError("At least one thread is required")
        if self.fmt not in ("json", "csv"):
            raise ConfigError(f"Unknown report format '{self.fmt}'")
        checks = _names(self.checks)
        if checks == ("all",):
            checks = tuple(CHECKS)
        unknown = [name for name in checks if name not in CHECKS]
        if unknown or not checks:
            raise ConfigError(f"Unknown checks: {', '.join(unknown) or 'none given'}")
        set_("checks", checks)
        set_("functionals", _names(self.functionals))
        set_("pairs", _names(self.pairs))
        try:
            set_(
                "_functionals",
                tuple(LiebFunctional.from_name(name) for name in self.functionals),
            )
            set_("_pairs", tuple(FactorPair.from_name(name) for name in self.pairs))
        except ValueError as err:
            raise ConfigError(str(err)) from err
        if not self._functionals or not self._pairs:
            raise ConfigError("At least one functional and one pair are required")

    @property
    def tolerance(self) -> Tolerance:
        return Tolerance(atol=self.tol_abs, rtol=self.tol_rel)

    @property
    def lieb_functionals(self) -> tuple[LiebFunctional, ...]:
        return self._functionals

    @property
    def factor_pairs(self) -> tuple[FactorPair, ...]:
        return self._pairs

    def to_dict(self) -> dict:
        """
        The settings that determine the outcomes of a run

        The output path, format, thread count, and metadata flag are left out, so
        that they cannot change the report.
        """
        return {
            "seed": self.seed,
            "trials": self.trials,
            "dims": list(self.dims),
            "tol_abs": self.tol_abs,
            "tol_rel": self.tol_rel,
            "checks": list(self.checks),
            "functionals": list(self.functionals),
            "pairs": list(self.pairs),
        }


def run_corpus(config: RunConfig, log: logging.Logger = None) -> list[CheckOutcome]:
    """
    Run every selected check for every dimension and trial

    Each trial draws from its own generator, so the outcomes depend only on the
    configuration, no matter how many threads run them or in which order they
    finish.

    Parameters
    ----------
    config: RunConfig
        The settings of the run
    log: Logger, optional
        A logging instance for recording progress

    Returns
    -------
    list[CheckOutcome]
        The outcomes, sorted by check, functional, pair, variant, dim, and trial
    """
    log = log or logging.getLogger(__name__)
    tasks = list(product(config.checks, config.dims, range(config.trials)))
    log.info(
        f"Running {len(config.checks)} checks over dims {list(config.dims)} with "
        f"{config.trials} trials each, {len(tasks)} tasks in total"
    )

    def work(task: tuple[str, int, int]) -> list[CheckOutcome]:
        check_id, dim, trial = task
        return run_trial(
            check_id,
            dim,
            trial,
            config.seed,
            config.lieb_functionals,
            config.factor_pairs,
            config.tolerance,
            log,
        )

    if config.threads == 1:
        results = list(map(work, tasks))
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            results = list(executor.map(work, tasks))
    outcomes = [outcome for result in results for outcome in result]
    return sorted(outcomes, key=CheckOutcome.sort_key)


def exit_code(outcomes: list[CheckOutcome]) -> ExitCode:
    """
    Failures take precedence over inconclusive outcomes
    """
    statuses = {outcome.status for outcome in outcomes}
    if FAIL in statuses:
        return ExitCode.FAIL
    if INCONCLUSIVE in statuses:
        return ExitCode.INCONCLUSIVE
    return ExitCode.PASS


def verify(config: RunConfig, log: logging.Logger = None) -> ExitCode:
    """
    Run the corpus, write the report, and summarize the outcomes

    Parameters
    ----------
    config: RunConfig
        The settings of the run. The report is only written if config.output is set.
    log: Logger, optional
        A logging instance for recording progress

    Returns
    -------
    ExitCode
        PASS only if every outcome passed
    """
    log = log or logging.getLogger(__name__)
    outcomes = run_corpus(config, log)
    report = Report(
        config.output or "-", config=config.to_dict(), fmt=config.fmt, log=log
    )
    report.set_outcomes(outcomes)
    if config.metadata:
        report.add_metadata(__version__)
    if config.output is not None:
        report.write()
    for check_id, entry in report.summary.items():
        log.info(
            f"{check_id}: {entry['outcomes']} outcomes over {entry['trials']} trials, "
            f"{entry['failures']} failed, {entry['inconclusive']} inconclusive, "
            f"min margin {entry['min_margin']}"
        )
    code = exit_code(outcomes)
    if code == ExitCode.FAIL:
        log.error(f"{report.failures} outcomes failed")
    elif code == ExitCode.INCONCLUSIVE:
        log.warning(f"{report.inconclusive} outcomes were inconclusive")
    return code
