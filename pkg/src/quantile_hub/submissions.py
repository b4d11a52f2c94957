"""Strict parsing, validation and serialization of submission CSV files.

Wire format (one file per participant and round)::

    forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975
    2021-11-03,DAX,1 day,-1.8,-0.3,0.1,0.6,1.7
    ...

Exactly one row per (target, horizon) cell of the round, dates as
YYYY-MM-DD, horizons as ``<n> day`` / ``<n> hour``. Files are named
``<YYYYMMDD>_<alias>.csv``; the alias is taken from the file name, never
from file content. Validation is total: any byte input yields either a
parsed submission or a report listing every problem found.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from datetime import date, datetime
from enum import Enum

from .core import (
    QuantileForecast,
    RoundSpec,
    Target,
    TargetKind,
    UnknownHorizonError,
    DEFAULT_LEVELS,
    target_for_name,
)

HEADER_COLUMNS = ("forecast_date", "target", "horizon") + DEFAULT_LEVELS.column_names()
HEADER_LINE = ",".join(HEADER_COLUMNS)

#: Aliases the platform generates itself; participant files must not use them.
RESERVED_ALIASES = frozenset({"benchmark", "emos", "ensemble_mean", "ensemble_median"})

_FILENAME_RE = re.compile(r"^(\d{8})_([A-Za-z0-9][A-Za-z0-9_-]*)\.csv$")


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class ErrorCode(str, Enum):
    """Machine-readable validation findings. Warnings do not reject a file."""

    NOT_TEXT = "not_text"
    EMPTY_FILE = "empty_file"
    BAD_HEADER = "bad_header"
    WRONG_COLUMN_COUNT = "wrong_column_count"
    BAD_DATE = "bad_date"
    WRONG_FORECAST_DATE = "wrong_forecast_date"
    UNKNOWN_TARGET = "unknown_target"
    UNKNOWN_HORIZON = "unknown_horizon"
    UNEXPECTED_ROW = "unexpected_row"
    DUPLICATE_ROW = "duplicate_row"
    MISSING_ROW = "missing_row"
    NON_NUMERIC_QUANTILE = "non_numeric_quantile"
    NON_FINITE_QUANTILE = "non_finite_quantile"
    NON_MONOTONE_QUANTILES = "non_monotone_quantiles"
    NEGATIVE_WIND_QUANTILE = "negative_wind_quantile"
    QUANTILES_RESORTED = "quantiles_resorted"
    RESERVED_ALIAS = "reserved_alias"
    BAD_FILENAME = "bad_filename"


@dataclass(frozen=True)
class Finding:
    """One validation finding, anchored to a 1-based line number.

    Line 0 marks file-level findings (missing rows, bad alias).
    """

    severity: Severity
    code: ErrorCode
    line: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def verdict(self) -> str:
        return "rejected" if self.errors else "accepted"

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)

    def codes(self) -> set[ErrorCode]:
        return {f.code for f in self.findings}

    def summary(self) -> str:
        lines = [self.verdict]
        for f in self.findings:
            lines.append(f"  line {f.line}: [{f.severity.value}/{f.code.value}] {f.message}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SubmissionFile:
    """A participant's full submission for one round."""

    participant_alias: str
    round_date: date
    rows: tuple[QuantileForecast, ...]

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            if row.round_date != self.round_date:
                raise ValueError("all rows must share the submission's round date")
            if row.cell in seen:
                raise ValueError(f"duplicate cell {row.cell}")
            seen.add(row.cell)

    def row_for(self, kind: TargetKind, horizon_label: str) -> QuantileForecast | None:
        for row in self.rows:
            if row.cell == (kind, horizon_label):
                return row
        return None


def submission_filename(round_date: date, alias: str) -> str:
    return f"{round_date.strftime('%Y%m%d')}_{alias}.csv"


def parse_submission_filename(name: str) -> tuple[date, str]:
    """Extract (round date, alias) from ``<YYYYMMDD>_<alias>.csv``."""
    m = _FILENAME_RE.match(name)
    if not m:
        raise ValueError(f"file name {name!r} does not match <YYYYMMDD>_<alias>.csv")
    stamp, alias = m.groups()
    return datetime.strptime(stamp, "%Y%m%d").date(), alias


def parse_submission(
    raw: bytes | str,
    round_spec: RoundSpec,
    alias: str,
    repair_sort: bool = False,
    allow_reserved: bool = False,
) -> tuple[SubmissionFile | None, ValidationReport]:
    """Parse one submission file against a round's expectations.

    Returns ``(submission, report)``; the submission is ``None`` exactly
    when the report's verdict is ``rejected``. Every problem is reported,
    not only the first. With ``repair_sort`` (organizer-only batch mode)
    non-monotone quantile rows are re-sorted ascending and downgraded to
    a warning instead of rejecting the file. ``allow_reserved`` admits the
    platform's own aliases when reading back generated forecast files.
    """
    findings: list[Finding] = []

    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            findings.append(
                Finding(Severity.ERROR, ErrorCode.NOT_TEXT, 0, f"not valid UTF-8: {exc}")
            )
            return None, ValidationReport(tuple(findings))
    else:
        text = raw

    if alias in RESERVED_ALIASES and not allow_reserved:
        findings.append(
            Finding(
                Severity.ERROR,
                ErrorCode.RESERVED_ALIAS,
                0,
                f"alias {alias!r} is reserved for platform-generated forecasts",
            )
        )

    text = text.lstrip("﻿")
    lines = text.splitlines()
    if not lines or not any(line.strip() for line in lines):
        findings.append(Finding(Severity.ERROR, ErrorCode.EMPTY_FILE, 0, "file is empty"))
        return None, ValidationReport(tuple(findings))

    header_cells = tuple(cell.strip() for cell in lines[0].split(","))
    if header_cells != HEADER_COLUMNS:
        findings.append(
            Finding(
                Severity.ERROR,
                ErrorCode.BAD_HEADER,
                1,
                f"header must be exactly {HEADER_LINE!r}, got {lines[0]!r}",
            )
        )
        return None, ValidationReport(tuple(findings))

    expected = {(t.kind, h.label): (t, h) for t, h in round_spec.expected_cells()}
    parsed: dict[tuple[TargetKind, str], QuantileForecast] = {}

    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(HEADER_COLUMNS):
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.WRONG_COLUMN_COUNT,
                    lineno,
                    f"expected {len(HEADER_COLUMNS)} columns, got {len(cells)}",
                )
            )
            continue

        row_ok = True

        try:
            forecast_date = date.fromisoformat(cells[0])
        except ValueError:
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.BAD_DATE,
                    lineno,
                    f"unparseable forecast_date {cells[0]!r} (expected YYYY-MM-DD)",
                )
            )
            row_ok = False
            forecast_date = None

        if forecast_date is not None and forecast_date != round_spec.round_date:
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.WRONG_FORECAST_DATE,
                    lineno,
                    f"forecast_date {forecast_date} does not match round {round_spec.round_date}",
                )
            )
            row_ok = False

        target: Target | None = None
        try:
            target = target_for_name(cells[1])
        except KeyError:
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.UNKNOWN_TARGET,
                    lineno,
                    f"unknown target {cells[1]!r}",
                )
            )
            row_ok = False

        horizon = None
        if target is not None:
            try:
                horizon = target.horizon_for_label(cells[2])
            except UnknownHorizonError:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        ErrorCode.UNKNOWN_HORIZON,
                        lineno,
                        f"unknown horizon {cells[2]!r} for target {cells[1]}",
                    )
                )
                row_ok = False

        quantiles: list[float] = []
        for col, cell in zip(HEADER_COLUMNS[3:], cells[3:]):
            try:
                value = float(cell)
            except ValueError:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        ErrorCode.NON_NUMERIC_QUANTILE,
                        lineno,
                        f"column {col}: {cell!r} is not a number",
                    )
                )
                row_ok = False
                continue
            if not math.isfinite(value):
                findings.append(
                    Finding(
                        Severity.ERROR,
                        ErrorCode.NON_FINITE_QUANTILE,
                        lineno,
                        f"column {col}: {cell!r} is not finite",
                    )
                )
                row_ok = False
                continue
            quantiles.append(value)

        if not row_ok or target is None or horizon is None:
            continue

        if sorted(quantiles) != quantiles:
            if repair_sort:
                findings.append(
                    Finding(
                        Severity.WARNING,
                        ErrorCode.QUANTILES_RESORTED,
                        lineno,
                        f"quantiles re-sorted ascending from {tuple(quantiles)}",
                    )
                )
                quantiles = sorted(quantiles)
            else:
                findings.append(
                    Finding(
                        Severity.ERROR,
                        ErrorCode.NON_MONOTONE_QUANTILES,
                        lineno,
                        f"quantiles must be non-decreasing across levels, got {tuple(quantiles)}",
                    )
                )
                continue

        if target.kind is TargetKind.WIND and quantiles[0] < 0.0:
            findings.append(
                Finding(
                    Severity.WARNING,
                    ErrorCode.NEGATIVE_WIND_QUANTILE,
                    lineno,
                    "negative wind quantile; clamped to 0 at scoring time only",
                )
            )

        key = (target.kind, horizon.label)
        if key in parsed:
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.DUPLICATE_ROW,
                    lineno,
                    f"duplicate row for ({target.kind.value}, {horizon.label})",
                )
            )
            continue
        if key not in expected:
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.UNEXPECTED_ROW,
                    lineno,
                    f"({target.kind.value}, {horizon.label}) is not part of this round",
                )
            )
            continue

        parsed[key] = QuantileForecast(
            target=target,
            horizon=horizon,
            round_date=round_spec.round_date,
            quantiles=tuple(quantiles),
        )

    for key in expected:
        if key not in parsed:
            kind, label = key
            findings.append(
                Finding(
                    Severity.ERROR,
                    ErrorCode.MISSING_ROW,
                    0,
                    f"missing row for ({kind.value}, {label})",
                )
            )

    report = ValidationReport(tuple(findings))
    if report.verdict == "rejected":
        return None, report

    ordered = tuple(parsed[(t.kind, h.label)] for t, h in round_spec.expected_cells())
    return SubmissionFile(alias, round_spec.round_date, ordered), report


def serialize_submission(sub: SubmissionFile) -> str:
    """Render a submission in canonical wire format.

    Rows are ordered DAX horizons ascending, then temperature, then wind;
    numbers use the shortest decimal representation that round-trips.
    """
    kind_order = {TargetKind.DAX: 0, TargetKind.TEMPERATURE: 1, TargetKind.WIND: 2}
    rows = sorted(
        sub.rows,
        key=lambda r: (kind_order[r.target.kind], r.target.horizons.index(r.horizon)),
    )
    lines = [HEADER_LINE]
    for row in rows:
        cells = [
            sub.round_date.isoformat(),
            row.target.kind.value,
            row.horizon.label,
            *(repr(q) for q in row.quantiles),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
