"""Leaderboard construction: imputation, per-cell ranks and the tiebreak cascade.

Per (target, horizon) cell, participants are ranked by their season-mean
quantile score (equivalently by skill score: for a fixed positive
benchmark mean the two orderings coincide). Missed rounds are filled with
a penalty of 1.01 times the worst participant average for the cell, so
skipping can never beat the weakest regular submission. Cell ranks are
averaged into the overall ranking; exact ties fall through best cell
rank, then average temperature rank, then a seeded pseudo-random draw
that is recorded for reproducibility.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Iterable, Mapping, Sequence

from scipy.stats import rankdata

from .core import TargetKind
from .scoring import ScoreRecord

IMPUTATION_FACTOR = 1.01

#: A cell is one (target kind, horizon label) pair, e.g. (DAX, "1 day").
CellKey = tuple[TargetKind, str]


class RankingInputError(ValueError):
    """Ranking inputs are incomplete or inconsistent."""


class TiebreakLevel(str, Enum):
    NONE = "none"
    BEST_RANK = "best_rank"
    TEMPERATURE_RANK = "temperature_rank"
    COIN_FLIP = "coin_flip"


def impute_missing(
    per_round_scores: Mapping[str, Mapping[date, float]],
    rounds: Sequence[date],
    factor: float = IMPUTATION_FACTOR,
) -> dict[str, float]:
    """Season-mean score per participant for one cell, with penalty fill-in.

    ``per_round_scores`` maps each alias to the per-round mean quantile
    scores of the rounds it was actually scored on; ``rounds`` is the full
    round set of the cell. Every missing (alias, round) contributes
    ``factor`` times the worst submitted-rounds average among all aliases,
    and the completed mean runs over all rounds.
    """
    if not rounds:
        raise RankingInputError("cell has no rounds")
    submitted_averages = [
        sum(scores.values()) / len(scores)
        for scores in per_round_scores.values()
        if scores
    ]
    if not submitted_averages:
        raise RankingInputError("no participant submitted anything for this cell")
    penalty = factor * max(submitted_averages)

    completed: dict[str, float] = {}
    round_set = set(rounds)
    for alias, scores in per_round_scores.items():
        extra = set(scores) - round_set
        if extra:
            raise RankingInputError(f"{alias} has scores outside the cell round set: {extra}")
        total = sum(scores.values()) + penalty * (len(rounds) - len(scores))
        completed[alias] = total / len(rounds)
    return completed


def rank_cells(
    cell_scores: Mapping[CellKey, Mapping[str, float]],
) -> "RankMatrix":
    """Fractional ranks per cell: lower score is better, ties share the average."""
    participants: set[str] = set()
    for scores in cell_scores.values():
        participants.update(scores)
    ordered = sorted(participants)
    for cell, scores in cell_scores.items():
        missing = participants - set(scores)
        if missing:
            raise RankingInputError(f"cell {cell}: no score for {sorted(missing)}")
        for alias, s in scores.items():
            if not math.isfinite(s):
                raise RankingInputError(f"cell {cell}: non-finite score for {alias}")

    cells: dict[CellKey, dict[str, float]] = {}
    for cell, scores in cell_scores.items():
        values = [scores[a] for a in ordered]
        ranks = rankdata(values, method="average")
        cells[cell] = {a: float(r) for a, r in zip(ordered, ranks)}
    return RankMatrix(tuple(ordered), cells)


@dataclass(frozen=True)
class RankMatrix:
    participants: tuple[str, ...]
    cells: dict[CellKey, dict[str, float]]

    def ranks_for(self, alias: str) -> list[float]:
        return [self.cells[c][alias] for c in sorted(self.cells)]

    def temperature_ranks(self, alias: str) -> list[float]:
        return [
            ranks[alias]
            for cell, ranks in sorted(self.cells.items())
            if cell[0] is TargetKind.TEMPERATURE
        ]


@dataclass(frozen=True)
class LeaderboardEntry:
    alias: str
    average_rank: float
    best_rank: float
    temperature_average_rank: float | None
    final_position: int
    tiebreak_applied: TiebreakLevel


def coin_flip_key(seed: int, alias: str) -> float:
    """Deterministic pseudo-random tiebreak draw, stable across platforms."""
    return random.Random(f"{seed}:{alias}").random()


def overall_ranking(matrix: RankMatrix, seed: int) -> list[LeaderboardEntry]:
    """Sort participants by average cell rank with the full tiebreak cascade.

    Ties in average rank fall through (i) best single-cell rank, (ii)
    average rank across temperature cells, (iii) the seeded draw. Each
    entry records the deepest criterion that was needed to separate it
    from an otherwise tied participant.
    """
    n_cells = len(matrix.cells)
    if n_cells == 0:
        raise RankingInputError("rank matrix has no cells")
    cell_order = sorted(matrix.cells)
    temp_cells = [c for c in cell_order if c[0] is TargetKind.TEMPERATURE]
    n_temp_cells = len(temp_cells)

    # Sums rather than means make tie detection exact: equal fractional
    # rank multisets produce identical partial sums.
    keys = {}
    for alias in matrix.participants:
        ranks = [matrix.cells[c][alias] for c in cell_order]
        temp = [matrix.cells[c][alias] for c in temp_cells]
        keys[alias] = (
            sum(ranks),
            min(ranks),
            sum(temp),
            coin_flip_key(seed, alias),
        )

    order = sorted(matrix.participants, key=lambda a: keys[a])

    entries = []
    for position, alias in enumerate(order, start=1):
        rank_sum, best, temp_sum, _ = keys[alias]
        tied_avg = [o for o in matrix.participants if o != alias and keys[o][0] == rank_sum]
        if not tied_avg:
            level = TiebreakLevel.NONE
        else:
            tied_best = [o for o in tied_avg if keys[o][1] == best]
            if not tied_best:
                level = TiebreakLevel.BEST_RANK
            else:
                tied_temp = [o for o in tied_best if keys[o][2] == temp_sum]
                level = TiebreakLevel.TEMPERATURE_RANK if not tied_temp else TiebreakLevel.COIN_FLIP
        entries.append(
            LeaderboardEntry(
                alias=alias,
                average_rank=rank_sum / n_cells,
                best_rank=best,
                temperature_average_rank=(temp_sum / n_temp_cells) if n_temp_cells else None,
                final_position=position,
                tiebreak_applied=level,
            )
        )
    return entries


def share_beating_benchmark(
    records: Iterable[ScoreRecord],
    benchmark_records: Iterable[ScoreRecord],
    round_date: date,
    target_kind: TargetKind,
) -> float | None:
    """Share of submitters whose across-horizon mean beats the benchmark's.

    Both means run over the horizon set the benchmark was scored on that
    round (all five in a regular week; fewer when an observation was
    missing). Ties do not count as beating. Returns None when nobody
    submitted for the round.
    """
    bench = {
        r.horizon_label: r.mean_quantile_score
        for r in benchmark_records
        if r.round_date == round_date and r.target_kind is target_kind
    }
    if not bench:
        raise RankingInputError(
            f"benchmark has no scores for {target_kind.value} on {round_date}"
        )
    horizon_set = set(bench)
    bench_mean = sum(bench.values()) / len(bench)

    per_alias: dict[str, dict[str, float]] = {}
    for r in records:
        if r.round_date == round_date and r.target_kind is target_kind and not r.imputed:
            per_alias.setdefault(r.participant, {})[r.horizon_label] = r.mean_quantile_score

    shares = []
    for alias, scores in per_alias.items():
        if set(scores) != horizon_set:
            continue  # partially scored submitters are not comparable
        shares.append(sum(scores.values()) / len(scores) < bench_mean)
    if not shares:
        return None
    return sum(shares) / len(shares)
