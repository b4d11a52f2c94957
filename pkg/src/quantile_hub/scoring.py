"""Pre-registered evaluation measures.

The primary measure is the linear quantile score
``QS_alpha(q, y) = 2 * (1{y < q} - alpha) * (q - y)``, a proper scoring
rule. Averaging it over the five submitted levels approximates the CRPS.
Absolute error of the median and coverage / length of the central 50% and
95% prediction intervals complete the per-forecast record; per-cell
averages and skill scores against the benchmark summarize a season.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .core import DEFAULT_LEVELS, QuantileForecast, TargetKind


class ScoreInputError(ValueError):
    """Inputs violate a scoring precondition (empty set, bad benchmark)."""


def quantile_score(alpha, q, y):
    """Linear quantile score (pinball loss, doubled).

    Parameters
    ----------
    alpha : float or ndarray
        Quantile level(s) in (0, 1).
    q : float or ndarray
        Predicted quantile(s).
    y : float or ndarray
        Observed value(s). Arguments broadcast against each other.

    Returns
    -------
    float or ndarray
        Nonnegative score; zero exactly at q = y.
    """
    alpha = np.asarray(alpha, dtype=float)
    q = np.asarray(q, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 2.0 * ((y < q).astype(float) - alpha) * (q - y)
    return out if out.ndim else float(out)


def quantile_scores(fc: QuantileForecast, y: float) -> np.ndarray:
    """One linear quantile score per submitted level."""
    return quantile_score(np.asarray(list(fc.levels)), np.asarray(fc.quantiles), y)


def crps_approx(fc: QuantileForecast, y: float) -> float:
    """Mean quantile score over the five levels (CRPS approximation)."""
    return float(np.mean(quantile_scores(fc, y)))


@dataclass(frozen=True)
class IntervalMetrics:
    covered_50: bool
    covered_95: bool
    len_50: float
    len_95: float
    abs_error: float


def interval_metrics(fc: QuantileForecast, y: float) -> IntervalMetrics:
    """Coverage (closed intervals), interval lengths and median error."""
    if not math.isfinite(y):
        raise ScoreInputError("observation must be finite")
    q025, q25, _, q75, q975 = fc.quantiles
    return IntervalMetrics(
        covered_50=bool(q25 <= y <= q75),
        covered_95=bool(q025 <= y <= q975),
        len_50=q75 - q25,
        len_95=q975 - q025,
        abs_error=abs(fc.quantiles[2] - y),
    )


@dataclass(frozen=True)
class ScoreRecord:
    """All evaluation measures for one (participant, cell, round) forecast."""

    participant: str
    target_kind: TargetKind
    horizon_label: str
    round_date: date
    quantile_score_values: tuple[float, ...]
    mean_quantile_score: float
    abs_error: float
    covered_50: bool
    covered_95: bool
    len_50: float
    len_95: float
    imputed: bool = False

    def __post_init__(self):
        expected = sum(self.quantile_score_values) / len(self.quantile_score_values)
        if not math.isclose(self.mean_quantile_score, expected, rel_tol=0, abs_tol=1e-9):
            raise ValueError("mean_quantile_score must equal the mean of the level scores")

    @property
    def cell(self) -> tuple[TargetKind, str]:
        return (self.target_kind, self.horizon_label)


def score_forecast(
    participant: str, fc: QuantileForecast, y: float, imputed: bool = False
) -> ScoreRecord:
    """Evaluate one forecast against its realized value."""
    y = float(y)
    qs = quantile_scores(fc, y)
    im = interval_metrics(fc, y)
    return ScoreRecord(
        participant=participant,
        target_kind=fc.target.kind,
        horizon_label=fc.horizon.label,
        round_date=fc.round_date,
        quantile_score_values=tuple(float(v) for v in qs),
        mean_quantile_score=float(np.mean(qs)),
        abs_error=im.abs_error,
        covered_50=im.covered_50,
        covered_95=im.covered_95,
        len_50=im.len_50,
        len_95=im.len_95,
        imputed=imputed,
    )


def coverage_rate(records: Sequence[ScoreRecord]) -> tuple[float, float]:
    """Share of covered outcomes of the 50% / 95% intervals, in percent.

    Records must be nonempty and belong to one (participant, target,
    horizon) cell; rounds with missing observations simply have no record
    and are therefore excluded automatically.
    """
    if not records:
        raise ScoreInputError("cannot compute coverage of an empty record set")
    keys = {(r.participant, r.target_kind, r.horizon_label) for r in records}
    if len(keys) > 1:
        raise ScoreInputError(f"records span several cells: {sorted(keys)}")
    n = len(records)
    rate_50 = 100.0 * sum(r.covered_50 for r in records) / n
    rate_95 = 100.0 * sum(r.covered_95 for r in records) / n
    return rate_50, rate_95


def skill_score(mean_score: float, bench_mean_score: float) -> float:
    """Relative improvement over the benchmark, ``1 - S / S_bench``."""
    if not (math.isfinite(bench_mean_score) and bench_mean_score > 0):
        raise ScoreInputError(
            f"benchmark mean score must be positive, got {bench_mean_score!r}"
        )
    return 1.0 - mean_score / bench_mean_score


@dataclass(frozen=True)
class AggregateScore:
    """Per-cell season summary for one participant."""

    participant: str
    target_kind: TargetKind
    horizon_label: str
    n_rounds: int
    mean_score: float
    skill: float


def aggregate(
    records: Iterable[ScoreRecord],
    benchmark_records: Iterable[ScoreRecord],
) -> list[AggregateScore]:
    """Average scores per (participant, cell) and skill vs. the benchmark.

    For each participant cell, the mean runs over the rounds that the
    participant was actually scored on, and the benchmark mean is taken
    over exactly the same round set so both sides exclude missing
    observations symmetrically.
    """
    bench: dict[tuple[TargetKind, str, date], float] = {}
    for r in benchmark_records:
        bench[(r.target_kind, r.horizon_label, r.round_date)] = r.mean_quantile_score

    by_cell: dict[tuple[str, TargetKind, str], list[ScoreRecord]] = {}
    for r in records:
        by_cell.setdefault((r.participant, r.target_kind, r.horizon_label), []).append(r)

    out = []
    for (participant, kind, label), cell_records in sorted(
        by_cell.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])
    ):
        scores = []
        bench_scores = []
        for r in cell_records:
            key = (kind, label, r.round_date)
            if key not in bench:
                raise ScoreInputError(
                    f"benchmark has no score for {kind.value}/{label} on {r.round_date}"
                )
            scores.append(r.mean_quantile_score)
            bench_scores.append(bench[key])
        mean_score = float(np.mean(scores))
        bench_mean = float(np.mean(bench_scores))
        out.append(
            AggregateScore(
                participant=participant,
                target_kind=kind,
                horizon_label=label,
                n_rounds=len(scores),
                mean_score=mean_score,
                skill=skill_score(mean_score, bench_mean),
            )
        )
    return out


SCORE_CSV_HEADER = (
    "participant,target,horizon,round_date,"
    + ",".join(f"qs_{name[1:]}" for name in DEFAULT_LEVELS.column_names())
    + ",mean_quantile_score,abs_error,covered_50,covered_95,len_50,len_95,imputed"
)


def scores_to_csv(records: Sequence[ScoreRecord]) -> str:
    """Stable-column-order CSV export (full float precision)."""
    lines = [SCORE_CSV_HEADER]
    for r in records:
        cells = [
            r.participant,
            r.target_kind.value,
            r.horizon_label,
            r.round_date.isoformat(),
            *(repr(v) for v in r.quantile_score_values),
            repr(r.mean_quantile_score),
            repr(r.abs_error),
            str(int(r.covered_50)),
            str(int(r.covered_95)),
            repr(r.len_50),
            repr(r.len_95),
            str(int(r.imputed)),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def scores_from_csv(text: str) -> list[ScoreRecord]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != SCORE_CSV_HEADER:
        raise ScoreInputError("unrecognized score CSV header")
    records = []
    for line in lines[1:]:
        c = line.split(",")
        records.append(
            ScoreRecord(
                participant=c[0],
                target_kind=TargetKind(c[1]),
                horizon_label=c[2],
                round_date=date.fromisoformat(c[3]),
                quantile_score_values=tuple(float(v) for v in c[4:9]),
                mean_quantile_score=float(c[9]),
                abs_error=float(c[10]),
                covered_50=bool(int(c[11])),
                covered_95=bool(int(c[12])),
                len_50=float(c[13]),
                len_95=float(c[14]),
                imputed=bool(int(c[15])),
            )
        )
    return records


def aggregates_to_csv(rows: Sequence[AggregateScore]) -> str:
    lines = ["participant,target,horizon,n_rounds,mean_score,skill"]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.participant,
                    r.target_kind.value,
                    r.horizon_label,
                    str(r.n_rounds),
                    repr(r.mean_score),
                    repr(r.skill),
                ]
            )
        )
    return "\n".join(lines) + "\n"
