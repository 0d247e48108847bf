from __future__ import annotations
import io
import csv
import json
import math
from pathlib import Path
from logging import Logger
from typing import Iterator
from datetime import datetime, timezone
from dataclasses import dataclass, asdict, fields

from .data import Data
from ..tolerance import Tolerance


PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class CheckOutcome:
    """
    The record of one inequality evaluated on one trial

    Attributes
    ----------
    check_id: str
        The name of the check
    functional: str
        The Lieb functional or norm involved, if any
    pair: str
        The factor pair involved, if any
    variant: str
        Which of the check's inequalities this is, when a check has several
    dim: int
        The matrix size
    trial: int
        The trial number
    seed: int
        The 64-bit seed that regenerates this trial's inputs
    lhs: float
        The smaller side of the inequality. Order relations A <= B are recorded
        with lhs = 0 and rhs = lambda_min(B - A).
    rhs: float
        The larger side of the inequality
    margin: float
        rhs - lhs
    status: str
        One of pass, fail, or inconclusive
    note: str
        Free-form details, like the error behind an inconclusive outcome
    """

    check_id: str
    functional: str = ""
    pair: str = ""
    variant: str = ""
    dim: int = 0
    trial: int = 0
    seed: int = 0
    lhs: float = None
    rhs: float = None
    margin: float = None
    status: str = INCONCLUSIVE
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @classmethod
    def compare(
        cls: CheckOutcome, lhs: float, rhs: float, tol: Tolerance, **ctx
    ) -> CheckOutcome:
        """
        Record the inequality lhs <= rhs

        It passes when rhs - lhs >= -(atol + rtol * max(1, |rhs|)). Non-finite sides
        make the outcome inconclusive.
        """
        lhs, rhs = float(lhs), float(rhs)
        if not (math.isfinite(lhs) and math.isfinite(rhs)):
            note = ctx.pop("note", "") or f"non-finite comparison {lhs} <= {rhs}"
            return cls.inconclusive(note, **ctx)
        margin = rhs - lhs
        status = PASS if margin >= -tol.bound(rhs) else FAIL
        return cls(lhs=lhs, rhs=rhs, margin=margin, status=status, **ctx)

    @classmethod
    def loewner(cls: CheckOutcome, lam_min: float, tol: Tolerance, **ctx):
        """
        Record an order relation A <= B from lambda_min(B - A)
        """
        return cls.compare(0.0, lam_min, tol, **ctx)

    @classmethod
    def inconclusive(cls: CheckOutcome, note: str, **ctx) -> CheckOutcome:
        return cls(status=INCONCLUSIVE, note=note, **ctx)

    def sort_key(self) -> tuple:
        return (
            self.check_id,
            self.functional,
            self.pair,
            self.variant,
            self.dim,
            self.trial,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls: CheckOutcome, obj: dict) -> CheckOutcome:
        names = {fld.name for fld in fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ValueError(f"Unknown outcome fields: {sorted(unknown)}")
        return cls(**obj)


def summarize(outcomes: list[CheckOutcome]) -> dict:
    """
    Per-check counts of trials, failures, and inconclusive outcomes along with
    the smallest margin
    """
    summary = {}
    for outcome in outcomes:
        entry = summary.setdefault(
            outcome.check_id,
            {
                "trials": set(),
                "outcomes": 0,
                "failures": 0,
                "inconclusive": 0,
                "min_margin": None,
            },
        )
        entry["trials"].add((outcome.dim, outcome.trial))
        entry["outcomes"] += 1
        entry["failures"] += outcome.status == FAIL
        entry["inconclusive"] += outcome.status == INCONCLUSIVE
        if outcome.margin is not None and (
            entry["min_margin"] is None or outcome.margin < entry["min_margin"]
        ):
            entry["min_margin"] = outcome.margin
    for entry in summary.values():
        entry["trials"] = len(entry["trials"])
    return dict(sorted(summary.items()))


class Report(Data):
    """
    The outcomes of a verification run, stored as JSON or CSV

    JSON reports hold {"config": {...}, "outcomes": [...], "summary": {...}} and an
    optional "metadata" object. CSV reports have one row per outcome under a fixed
    header. The format is chosen from the file extension, and a ".gz" suffix
    compresses either one.

    Attributes
    ----------
    data : list[CheckOutcome]
        The outcomes, sorted by check, functional, pair, variant, dim, and trial
    fname : Path | str
        The path to the report. "-" writes JSON to stdout unless fmt says otherwise
    config : dict
        The run configuration that produced the outcomes
    metadata : dict
        The version and creation time of the report; None unless requested, so
        that reports from identical runs are byte-identical
    fmt : str
        Either "json" or "csv"
    log: Logger
        A logging instance for recording debug statements.
    """

    CSV_HEADER = tuple(fld.name for fld in fields(CheckOutcome))

    def __init__(
        self,
        fname: Path | str,
        config: dict = None,
        fmt: str = None,
        log: Logger = None,
    ):
        super().__init__(fname, log)
        self.config = config or {}
        self.metadata = None
        self.fmt = fmt or self.infer_format(self.fname)
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"Unknown report format '{self.fmt}'")

    @staticmethod
    def infer_format(fname: Path | str) -> str:
        """
        "csv" for .csv and .csv.gz files and "json" for anything else
        """
        fname = Path(fname)
        suffixes = [suffix for suffix in fname.suffixes if suffix != ".gz"]
        if suffixes and suffixes[-1] == ".csv":
            return "csv"
        return "json"

    @classmethod
    def load(cls: Report, fname: Path | str, fmt: str = None) -> Report:
        """
        Load a report written by :py:meth:`~.Report.write`
        """
        report = cls(fname, fmt=fmt)
        report.read()
        return report

    def read(self):
        """
        Read the outcomes (and, for JSON, the config and metadata) from the file

        Raises
        ------
        ValueError
            If the file does not follow the report format
        """
        super().read()
        with self.hook_compressed(self.fname, mode="r") as report:
            text = report.read()
        if self.fmt == "csv":
            self.data = self._parse_csv(text)
            return
        obj = json.loads(text)
        if not isinstance(obj, dict) or "outcomes" not in obj:
            raise ValueError(f"{self.fname} does not hold a report")
        self.config = obj.get("config", {})
        self.metadata = obj.get("metadata")
        self.data = [CheckOutcome.from_dict(outcome) for outcome in obj["outcomes"]]

    def _parse_csv(self, text: str) -> list[CheckOutcome]:
        rows = csv.reader(io.StringIO(text))
        header = tuple(next(rows, ()))
        if header != self.CSV_HEADER:
            raise ValueError(f"Unexpected CSV header in {self.fname}: {header}")
        outcomes = []
        for row in rows:
            record = dict(zip(header, row))
            for key in ("dim", "trial", "seed"):
                record[key] = int(record[key])
            for key in ("lhs", "rhs", "margin"):
                record[key] = float(record[key]) if record[key] else None
            outcomes.append(CheckOutcome(**record))
        return outcomes

    def set_outcomes(self, outcomes: list[CheckOutcome]):
        """
        Store outcomes in their canonical order
        """
        self.data = sorted(outcomes, key=CheckOutcome.sort_key)

    def add_metadata(self, version: str):
        self.metadata = {
            "version": version,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }

    @property
    def summary(self) -> dict:
        return summarize(self.data or [])

    @property
    def failures(self) -> int:
        return sum(outcome.status == FAIL for outcome in self.data or [])

    @property
    def inconclusive(self) -> int:
        return sum(outcome.status == INCONCLUSIVE for outcome in self.data or [])

    def to_json(self) -> str:
        obj = {
            "config": self.config,
            "outcomes": [outcome.to_dict() for outcome in self.data or []],
            "summary": self.summary,
        }
        if self.metadata is not None:
            obj["metadata"] = self.metadata
        return json.dumps(obj, indent=2) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for outcome in self.data or []:
            record = outcome.to_dict()
            writer.writerow(
                "" if record[key] is None else record[key] for key in self.CSV_HEADER
            )
        return out.getvalue()

    def write(self):
        """
        Write the report to :py:attr:`~.Report.fname` in :py:attr:`~.Report.fmt`
        """
        text = self.to_csv() if self.fmt == "csv" else self.to_json()
        with self.hook_compressed(self.fname, mode="w") as report:
            report.write(text)
        self.log.debug(f"Wrote {len(self.data or [])} outcomes to {self.fname}")

    def __iter__(self) -> Iterator[CheckOutcome]:
        if self.data is None:
            self.read()
        yield from self.data
