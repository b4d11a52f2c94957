import pytest

from quantile_hub import (
    TargetKind,
    TiebreakLevel,
    impute_missing,
    overall_ranking,
    rank_cells,
    share_beating_benchmark,
)
from quantile_hub.ranking import RankingInputError, coin_flip_key

from test_scoring import record, weekly  # reuse the ScoreRecord factory

ROUNDS = weekly(13)

DAX_1D = (TargetKind.DAX, "1 day")
DAX_2D = (TargetKind.DAX, "2 day")
TEMP_36 = (TargetKind.TEMPERATURE, "36 hour")


class TestImputeMissing:
    def test_fully_missing_participant(self):
        scores = {
            "toad": {d: 10.0 for d in ROUNDS},
            "ghost": {},
        }
        completed = impute_missing(scores, ROUNDS)
        assert completed["toad"] == pytest.approx(10.0)
        assert completed["ghost"] == pytest.approx(10.1)

    def test_no_missing_is_identity(self):
        scores = {
            "a": {d: 1.0 for d in ROUNDS},
            "b": {d: 2.0 for d in ROUNDS},
        }
        completed = impute_missing(scores, ROUNDS)
        assert completed == {"a": pytest.approx(1.0), "b": pytest.approx(2.0)}

    def test_one_missing_round_of_thirteen(self):
        scores = {
            "toad": {d: 4.0 for d in ROUNDS[:-1]},  # 12 of 13 rounds
            "worst": {d: 10.0 for d in ROUNDS},
        }
        completed = impute_missing(scores, ROUNDS)
        assert completed["toad"] == pytest.approx((12 * 4.0 + 10.1) / 13)

    def test_imputed_contribution_dominates_worst_average(self):
        # each missed round costs strictly more than the worst submitted-rounds
        # average, so a fully absent participant always lands below it
        scores = {
            "good_but_flaky": {d: 0.1 for d in ROUNDS[:5]},
            "worst": {d: 7.0 for d in ROUNDS},
            "absent": {},
        }
        completed = impute_missing(scores, ROUNDS)
        flaky_imputed_part = (
            completed["good_but_flaky"] * len(ROUNDS) - 5 * 0.1
        ) / (len(ROUNDS) - 5)
        assert flaky_imputed_part == pytest.approx(1.01 * 7.0)
        assert completed["absent"] == pytest.approx(1.01 * 7.0)
        assert completed["absent"] > completed["worst"]

    def test_no_submissions_at_all_rejected(self):
        with pytest.raises(RankingInputError):
            impute_missing({"a": {}, "b": {}}, ROUNDS)


class TestRankCells:
    def test_plain_ranks(self):
        matrix = rank_cells({DAX_1D: {"a": 1.0, "b": 2.0, "c": 3.0}})
        assert matrix.cells[DAX_1D] == {"a": 1.0, "b": 2.0, "c": 3.0}

    def test_ties_get_average_rank(self):
        matrix = rank_cells({DAX_1D: {"a": 1.0, "b": 1.0, "c": 3.0}})
        assert matrix.cells[DAX_1D] == {"a": 1.5, "b": 1.5, "c": 3.0}

    def test_skill_ordering_equals_score_ordering(self):
        scores = {"a": 0.5, "b": 1.2, "c": 0.9}
        bench = 1.1
        by_score = rank_cells({DAX_1D: scores})
        by_skill_source = {k: 1.0 - v / bench for k, v in scores.items()}
        # higher skill is better, so rank on the negated skill
        by_skill = rank_cells({DAX_1D: {k: -v for k, v in by_skill_source.items()}})
        assert by_score.cells[DAX_1D] == by_skill.cells[DAX_1D]

    def test_missing_participant_rejected(self):
        with pytest.raises(RankingInputError):
            rank_cells({DAX_1D: {"a": 1.0}, DAX_2D: {"a": 1.0, "b": 2.0}})

    def test_non_finite_rejected(self):
        with pytest.raises(RankingInputError):
            rank_cells({DAX_1D: {"a": float("nan"), "b": 1.0}})


class TestOverallRanking:
    def test_distinct_average_ranks(self):
        matrix = rank_cells(
            {
                DAX_1D: {"a": 1.0, "b": 2.0},
                DAX_2D: {"a": 1.0, "b": 2.0},
            }
        )
        entries = overall_ranking(matrix, seed=1)
        assert [e.alias for e in entries] == ["a", "b"]
        assert [e.final_position for e in entries] == [1, 2]
        assert all(e.tiebreak_applied is TiebreakLevel.NONE for e in entries)

    def test_best_rank_breaks_tie(self):
        # all three tie on average rank 2.0; 'b' (best rank 2) is separated
        # from 'a' and 'c' (best rank 1) at the best-rank level
        matrix = rank_cells(
            {
                DAX_1D: {"a": 1.0, "b": 2.0, "c": 3.0},
                DAX_2D: {"a": 3.0, "b": 2.0, "c": 1.0},
            }
        )
        entries = overall_ranking(matrix, seed=1)
        by_alias = {e.alias: e for e in entries}
        assert by_alias["a"].final_position < by_alias["b"].final_position
        assert by_alias["c"].final_position < by_alias["b"].final_position
        assert by_alias["b"].tiebreak_applied is TiebreakLevel.BEST_RANK
        # a and c stay tied through best rank and (absent) temperature cells
        assert by_alias["a"].tiebreak_applied is TiebreakLevel.COIN_FLIP

    def test_temperature_rank_breaks_deeper_tie(self):
        # a and b tie on average rank and best rank; b wins both temperature
        # cells, a wins both DAX cells, so the temperature level separates them
        matrix = rank_cells(
            {
                DAX_1D: {"a": 1.0, "b": 2.0, "c": 3.0},
                DAX_2D: {"a": 1.0, "b": 2.0, "c": 3.0},
                TEMP_36: {"a": 2.0, "b": 1.0, "c": 3.0},
                (TargetKind.TEMPERATURE, "48 hour"): {"a": 2.0, "b": 1.0, "c": 3.0},
            }
        )
        entries = overall_ranking(matrix, seed=3)
        by_alias = {e.alias: e for e in entries}
        assert by_alias["b"].final_position == 1
        assert by_alias["a"].final_position == 2
        assert by_alias["b"].tiebreak_applied is TiebreakLevel.TEMPERATURE_RANK
        assert by_alias["a"].tiebreak_applied is TiebreakLevel.TEMPERATURE_RANK
        assert by_alias["c"].tiebreak_applied is TiebreakLevel.NONE

    def test_fully_tied_profiles_fall_to_coin_flip(self):
        matrix = rank_cells(
            {
                DAX_1D: {"a": 1.0, "b": 2.0},
                DAX_2D: {"a": 2.0, "b": 1.0},
                TEMP_36: {"a": 1.0, "b": 2.0},
                (TargetKind.TEMPERATURE, "48 hour"): {"a": 2.0, "b": 1.0},
            }
        )
        # averages tie at 1.5, bests tie at 1, temperature sums tie at 3
        entries = overall_ranking(matrix, seed=3)
        assert {e.tiebreak_applied for e in entries} == {TiebreakLevel.COIN_FLIP}

    def test_coin_flip_deterministic_per_seed(self):
        matrix = rank_cells({DAX_1D: {"a": 1.0, "b": 1.0}})
        order_42a = [e.alias for e in overall_ranking(matrix, seed=42)]
        order_42b = [e.alias for e in overall_ranking(matrix, seed=42)]
        assert order_42a == order_42b
        assert {e.tiebreak_applied for e in overall_ranking(matrix, seed=42)} == {
            TiebreakLevel.COIN_FLIP
        }
        # a different seed may or may not flip the order, but stays a permutation
        assert sorted(e.alias for e in overall_ranking(matrix, seed=43)) == ["a", "b"]

    def test_positions_gapless(self):
        matrix = rank_cells(
            {DAX_1D: {c: 1.0 for c in "abcdef"}}
        )
        entries = overall_ranking(matrix, seed=9)
        assert sorted(e.final_position for e in entries) == [1, 2, 3, 4, 5, 6]

    def test_improving_one_cell_never_hurts(self):
        base_scores = {
            DAX_1D: {"a": 2.0, "b": 1.0, "c": 3.0},
            DAX_2D: {"a": 2.0, "b": 3.0, "c": 1.0},
            TEMP_36: {"a": 2.0, "b": 1.0, "c": 3.0},
        }
        base_pos = {
            e.alias: e.final_position
            for e in overall_ranking(rank_cells(base_scores), seed=5)
        }
        improved = {cell: dict(scores) for cell, scores in base_scores.items()}
        improved[DAX_1D]["a"] = 0.5  # strictly better score for a
        new_pos = {
            e.alias: e.final_position
            for e in overall_ranking(rank_cells(improved), seed=5)
        }
        assert new_pos["a"] <= base_pos["a"]

    def test_coin_flip_key_stable(self):
        assert coin_flip_key(42, "toad") == coin_flip_key(42, "toad")
        assert coin_flip_key(42, "toad") != coin_flip_key(43, "toad")


def five_horizon_records(alias, scores_by_horizon, kind=TargetKind.WIND, round_date=ROUNDS[0]):
    return [
        record(alias, score=s, round_date=round_date, kind=kind, horizon=h)
        for h, s in scores_by_horizon.items()
    ]


WIND_HORIZONS = ["36 hour", "48 hour", "60 hour", "72 hour", "84 hour"]


class TestShareBeatingBenchmark:
    def bench(self, score=2.0, round_date=ROUNDS[0]):
        return five_horizon_records(
            "benchmark", {h: score for h in WIND_HORIZONS}, round_date=round_date
        )

    def test_half_beat(self):
        records = []
        for alias, s in [("a", 1.0), ("b", 1.5), ("c", 2.5), ("d", 3.0)]:
            records += five_horizon_records(alias, {h: s for h in WIND_HORIZONS})
        share = share_beating_benchmark(records, self.bench(), ROUNDS[0], TargetKind.WIND)
        assert share == 0.5

    def test_tie_does_not_count(self):
        records = five_horizon_records("a", {h: 2.0 for h in WIND_HORIZONS})
        share = share_beating_benchmark(records, self.bench(), ROUNDS[0], TargetKind.WIND)
        assert share == 0.0

    def test_no_submitters_is_missing(self):
        share = share_beating_benchmark([], self.bench(), ROUNDS[0], TargetKind.WIND)
        assert share is None

    def test_missing_benchmark_rejected(self):
        with pytest.raises(RankingInputError):
            share_beating_benchmark([], [], ROUNDS[0], TargetKind.WIND)

    def test_reduced_horizon_set_on_holiday_round(self):
        # benchmark scored on four horizons only; comparison uses those four
        bench = five_horizon_records(
            "benchmark", {h: 2.0 for h in WIND_HORIZONS[:4]}
        )
        records = five_horizon_records("a", {h: 1.0 for h in WIND_HORIZONS[:4]})
        # a participant missing one of those horizons is not comparable
        records += five_horizon_records("b", {h: 1.0 for h in WIND_HORIZONS[:3]})
        share = share_beating_benchmark(records, bench, ROUNDS[0], TargetKind.WIND)
        assert share == 1.0
