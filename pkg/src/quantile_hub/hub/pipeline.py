"""Round lifecycle orchestration: ingest, score, leaderboard, exports.

One Hub instance wraps a Store and drives the weekly workflow. All
operations are deterministic given the store content and the configured
seed, so re-running any step reproduces byte-identical artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time
from pathlib import Path

import numpy as np

from ..core import (
    QuantileForecast,
    RoundSpec,
    TargetKind,
    UTC,
    resolve_valid_time,
    target_for_name,
)
from ..benchmarks import (
    EmosParams,
    FAMILY_FOR_TARGET,
    FitError,
    RollingWindowConfig,
    dax_benchmark,
    emos_fit,
    emos_predict,
    raw_ensemble_benchmark,
    serialize_emos_params,
)
from ..ensemble import EnsembleMethod, EnsembleSpec, combine
from ..ingestion import (
    InsufficientHistoryError,
    NWP_VARIABLE_FOR_TARGET,
    NwpStore,
    ObservationSeries,
    dax_outcome,
    load_nwp_file,
    load_observations,
    load_prices,
)
from ..ranking import (
    RankingInputError,
    impute_missing,
    overall_ranking,
    rank_cells,
    share_beating_benchmark,
)
from ..scoring import (
    AggregateScore,
    ScoreRecord,
    aggregate,
    aggregates_to_csv,
    coverage_rate,
    scores_from_csv,
    scores_to_csv,
    score_forecast,
)
from ..submissions import (
    RESERVED_ALIASES,
    parse_submission,
    parse_submission_filename,
    serialize_submission,
    submission_filename,
    SubmissionFile,
)
from .state import ChallengeConfig, Store, StoreError, content_hash, dump_json

BENCHMARK_ALIAS = "benchmark"
EMOS_ALIAS = "emos"

#: Number of missed rounds a participant may accumulate without a flag.
ALLOWED_MISSES = 2


@dataclass(frozen=True)
class IngestResult:
    filename: str
    alias: str | None
    accepted: bool
    deduplicated: bool
    messages: tuple[str, ...]


@dataclass(frozen=True)
class IngestSummary:
    round_date: date
    results: tuple[IngestResult, ...]

    @property
    def accepted_aliases(self) -> tuple[str, ...]:
        return tuple(sorted(r.alias for r in self.results if r.accepted and r.alias))

    @property
    def rejected_aliases(self) -> tuple[str, ...]:
        return tuple(
            sorted(r.alias for r in self.results if not r.accepted and r.alias)
        )


@dataclass(frozen=True)
class CellNote:
    """Why a cell produced no score (missing observation or input data)."""

    target: str
    horizon: str
    reason: str


@dataclass(frozen=True)
class ScoreSummary:
    round_date: date
    n_records: int
    aliases_scored: tuple[str, ...]
    skipped_cells: tuple[CellNote, ...]


class Hub:
    def __init__(self, store: Store):
        self.store = store

    # ------------------------------------------------------------------ setup

    @classmethod
    def initialize(cls, root: str | Path, cfg: ChallengeConfig) -> "Hub":
        store = Store(root)
        store.initialize(cfg)
        return cls(store)

    @property
    def config(self) -> ChallengeConfig:
        return self.store.config()

    def round_spec(self, round_date: date) -> RoundSpec:
        return RoundSpec(round_date, targets=self.config.targets_for(round_date))

    # ------------------------------------------------------------------ rounds

    def open_round(self, round_date: date) -> RoundSpec:
        cfg = self.config
        if round_date not in cfg.round_dates():
            raise StoreError(
                f"{round_date} is not a round date of this season "
                f"(Wednesdays {cfg.season_start}..{cfg.season_end} minus breaks)"
            )
        if round_date in self.store.round_states():
            raise StoreError(f"round {round_date} already exists")
        with self.store.writer_lock():
            self.store.set_round_state(round_date, "open")
        return self.round_spec(round_date)

    # ------------------------------------------------------------------ data

    def load_prices_file(self, path: str | Path) -> int:
        series = load_prices(path)  # validate before persisting
        with self.store.writer_lock():
            self.store.atomic_write_bytes(
                self.store.prices_path, Path(path).read_bytes()
            )
        return len(series)

    def load_observations_file(self, target_name: str, path: str | Path) -> int:
        target = target_for_name(target_name)
        series = load_observations(path, target)
        with self.store.writer_lock():
            self.store.atomic_write_bytes(
                self.store.observations_path(target_name), Path(path).read_bytes()
            )
        return len(series.values)

    def load_nwp_files(self, paths: list[str | Path]) -> int:
        n = 0
        with self.store.writer_lock():
            for path in paths:
                records = load_nwp_file(path)
                init = records[0].init_time if records else None
                name = (
                    init.strftime("%Y%m%dT%H%M%S.txt")
                    if init is not None
                    else Path(path).name
                )
                self.store.atomic_write_bytes(
                    self.store.nwp_dir / name, Path(path).read_bytes()
                )
                n += len(records)
        return n

    # ------------------------------------------------------------------ ingest

    def ingest_directory(self, round_date: date, directory: str | Path) -> IngestSummary:
        states = self.store.round_states()
        if round_date not in states:
            raise StoreError(f"round {round_date} has not been opened")
        if states[round_date] == "scored":
            raise StoreError(f"round {round_date} is already scored; ingest is closed")
        spec = self.round_spec(round_date)
        directory = Path(directory)
        if not directory.is_dir():
            raise StoreError(f"{directory} is not a directory")

        results: list[IngestResult] = []
        with self.store.writer_lock():
            manifest = self._read_manifest(round_date)
            for path in sorted(directory.iterdir()):
                if not path.is_file():
                    continue
                try:
                    file_date, alias = parse_submission_filename(path.name)
                except ValueError as exc:
                    results.append(
                        IngestResult(path.name, None, False, False, (f"skipped: {exc}",))
                    )
                    continue
                if file_date != round_date:
                    results.append(
                        IngestResult(
                            path.name,
                            alias,
                            False,
                            False,
                            (f"skipped: file date {file_date} is not round {round_date}",),
                        )
                    )
                    continue
                raw = path.read_bytes()
                digest = content_hash(raw)
                known = [e for e in manifest["ingests"] if e["alias"] == alias]
                if any(e["hash"] == digest for e in known):
                    results.append(
                        IngestResult(path.name, alias, manifest["effective"].get(alias) == digest, True, ("already ingested (identical content)",))
                    )
                    continue
                sub, report = parse_submission(raw, spec, alias)
                messages = tuple(
                    f"line {f.line}: [{f.severity.value}/{f.code.value}] {f.message}"
                    for f in report.findings
                )
                accepted = sub is not None
                entry = {
                    "alias": alias,
                    "hash": digest,
                    "source": path.name,
                    "accepted": accepted,
                    "findings": list(messages),
                }
                manifest["ingests"].append(entry)
                if accepted:
                    stored = self.store.submissions_dir(round_date) / f"{alias}__{digest}.csv"
                    self.store.atomic_write_bytes(stored, raw)
                    manifest["effective"][alias] = digest
                results.append(IngestResult(path.name, alias, accepted, False, messages))
            self._write_manifest(round_date, manifest)
        return IngestSummary(round_date, tuple(results))

    def _read_manifest(self, round_date: date) -> dict:
        path = self.store.manifest_path(round_date)
        if path.is_file():
            return self.store.read_json(path)
        return {"ingests": [], "effective": {}}

    def _write_manifest(self, round_date: date, manifest: dict) -> None:
        self.store.atomic_write_text(self.store.manifest_path(round_date), dump_json(manifest))

    def effective_submissions(self, round_date: date) -> dict[str, SubmissionFile]:
        """Latest accepted submission per alias for a round."""
        manifest = self._read_manifest(round_date)
        spec = self.round_spec(round_date)
        out: dict[str, SubmissionFile] = {}
        for alias, digest in sorted(manifest["effective"].items()):
            path = self.store.submissions_dir(round_date) / f"{alias}__{digest}.csv"
            sub, report = parse_submission(path.read_bytes(), spec, alias)
            if sub is None:
                raise StoreError(
                    f"stored submission {path} no longer parses: {report.summary()}"
                )
            out[alias] = sub
        return out

    # ------------------------------------------------------------------ scoring

    def score_round(self, round_date: date) -> ScoreSummary:
        states = self.store.round_states()
        if round_date not in states:
            raise StoreError(f"round {round_date} has not been opened")
        cfg = self.config
        spec = self.round_spec(round_date)

        prices = self._prices()
        nwp = self._nwp_store()
        obs = {
            kind: self._observations(kind)
            for kind in (TargetKind.TEMPERATURE, TargetKind.WIND)
        }

        outcomes, outcome_notes = self._outcomes(spec, prices, obs)
        if all(v is None for v in outcomes.values()):
            raise StoreError(
                f"no observations available yet for round {round_date}; cannot score"
            )

        forecasts: dict[str, dict[tuple[TargetKind, str], QuantileForecast]] = {}
        notes: list[CellNote] = list(outcome_notes)

        submissions = self.effective_submissions(round_date)
        for alias, sub in submissions.items():
            forecasts[alias] = {row.cell: row for row in sub.rows}

        bench, bench_notes = self._benchmark_forecasts(spec, prices, nwp)
        forecasts[BENCHMARK_ALIAS] = bench
        notes.extend(bench_notes)

        emos_fc, emos_params, emos_notes = self._emos_forecasts(spec, nwp, obs, cfg)
        if emos_fc:
            forecasts[EMOS_ALIAS] = emos_fc
        notes.extend(emos_notes)

        for method in (EnsembleMethod.MEAN, EnsembleMethod.MEDIAN):
            spec_e = EnsembleSpec(method, tuple(sorted(submissions)))
            combined: dict[tuple[TargetKind, str], QuantileForecast] = {}
            for target, horizon in spec.expected_cells():
                cell = (target.kind, horizon.label)
                members = [
                    forecasts[a][cell]
                    for a in sorted(submissions)
                    if cell in forecasts[a]
                ]
                if members:
                    combined[cell] = combine(members, spec_e)
            if combined:
                forecasts[spec_e.alias] = combined

        with self.store.writer_lock():
            if states[round_date] == "open":
                self.store.set_round_state(round_date, "closed")

            for alias in (BENCHMARK_ALIAS, EMOS_ALIAS, "ensemble_mean", "ensemble_median"):
                cells = forecasts.get(alias)
                if not cells:
                    continue
                rows = tuple(cells[c] for c in sorted(cells, key=lambda c: (c[0].value, c[1])))
                derived = SubmissionFile(alias, round_date, rows)
                self.store.atomic_write_text(
                    self.store.derived_dir(round_date) / submission_filename(round_date, alias),
                    serialize_submission(derived),
                )
            for (kind, label), params in sorted(emos_params.items()):
                name = f"{kind.value}_{label.replace(' ', '')}.txt"
                self.store.atomic_write_text(
                    self.store.emos_dir(round_date) / name, serialize_emos_params(params)
                )

            records: list[ScoreRecord] = []
            for alias in sorted(forecasts):
                for target, horizon in spec.expected_cells():
                    cell = (target.kind, horizon.label)
                    fc = forecasts[alias].get(cell)
                    y = outcomes.get(cell)
                    if fc is None or y is None:
                        continue
                    if target.kind is TargetKind.WIND:
                        fc = fc.floor_at_zero()
                    records.append(score_forecast(alias, fc, y))
            self.store.atomic_write_text(
                self.store.scores_path(round_date), scores_to_csv(records)
            )
            self.store.set_round_state(round_date, "scored")
            self._rebuild_leaderboard()

        return ScoreSummary(
            round_date=round_date,
            n_records=len(records),
            aliases_scored=tuple(sorted(forecasts)),
            skipped_cells=tuple(notes),
        )

    # ------------------------------------------------------------------ inputs

    def _prices(self):
        if not self.store.prices_path.is_file():
            return None
        return load_prices(self.store.prices_path)

    def _observations(self, kind: TargetKind) -> ObservationSeries | None:
        path = self.store.observations_path(kind.value)
        if not path.is_file():
            return None
        return load_observations(path, target_for_name(kind.value))

    def _nwp_store(self) -> NwpStore:
        store = NwpStore()
        if self.store.nwp_dir.is_dir():
            for path in sorted(self.store.nwp_dir.iterdir()):
                if path.suffix == ".txt":
                    store.add(load_nwp_file(path))
        return store

    def _outcomes(
        self,
        spec: RoundSpec,
        prices,
        obs: dict[TargetKind, ObservationSeries | None],
    ) -> tuple[dict[tuple[TargetKind, str], float | None], list[CellNote]]:
        outcomes: dict[tuple[TargetKind, str], float | None] = {}
        notes: list[CellNote] = []
        for target, horizon in spec.expected_cells():
            cell = (target.kind, horizon.label)
            if target.kind is TargetKind.DAX:
                if prices is None:
                    outcomes[cell] = None
                    notes.append(CellNote(target.kind.value, horizon.label, "no price data"))
                    continue
                y = dax_outcome(prices, spec.round_date, horizon.magnitude)
                outcomes[cell] = y
                if y is None:
                    notes.append(
                        CellNote(target.kind.value, horizon.label, "no close at valid date (holiday)")
                    )
            else:
                series = obs[target.kind]
                if series is None:
                    outcomes[cell] = None
                    notes.append(CellNote(target.kind.value, horizon.label, "no observation series"))
                    continue
                ob = series.get(resolve_valid_time(spec, target, horizon))
                outcomes[cell] = ob.value
                if ob.value is None:
                    notes.append(
                        CellNote(target.kind.value, horizon.label, "observation missing")
                    )
        return outcomes, notes

    def _benchmark_forecasts(
        self, spec: RoundSpec, prices, nwp: NwpStore
    ) -> tuple[dict[tuple[TargetKind, str], QuantileForecast], list[CellNote]]:
        out: dict[tuple[TargetKind, str], QuantileForecast] = {}
        notes: list[CellNote] = []
        cfg = self.config
        targets = {t.kind for t in spec.targets}

        if TargetKind.DAX in targets:
            if prices is None:
                notes.append(CellNote("DAX", "*", "benchmark skipped: no price data"))
            else:
                try:
                    for fc in dax_benchmark(
                        prices, spec, RollingWindowConfig(cfg.dax_window_days)
                    ):
                        out[fc.cell] = fc
                except InsufficientHistoryError as exc:
                    notes.append(CellNote("DAX", "*", f"benchmark skipped: {exc}"))

        init = datetime.combine(spec.round_date, time(0), tzinfo=UTC)
        for target in spec.targets:
            if target.kind is TargetKind.DAX:
                continue
            variable = NWP_VARIABLE_FOR_TARGET[target.kind]
            for horizon in target.horizons:
                rec = nwp.get(variable, init, horizon.magnitude)
                if rec is None:
                    notes.append(
                        CellNote(
                            target.kind.value,
                            horizon.label,
                            "benchmark skipped: no ensemble forecast for this round",
                        )
                    )
                    continue
                out[(target.kind, horizon.label)] = raw_ensemble_benchmark(
                    rec, target, spec.round_date
                )
        return out, notes

    def _emos_forecasts(
        self,
        spec: RoundSpec,
        nwp: NwpStore,
        obs: dict[TargetKind, ObservationSeries | None],
        cfg: ChallengeConfig,
    ) -> tuple[
        dict[tuple[TargetKind, str], QuantileForecast],
        dict[tuple[TargetKind, str], EmosParams],
        list[CellNote],
    ]:
        forecasts: dict[tuple[TargetKind, str], QuantileForecast] = {}
        params_out: dict[tuple[TargetKind, str], EmosParams] = {}
        notes: list[CellNote] = []
        anchor = datetime.combine(spec.round_date, time(0), tzinfo=UTC)

        for target in spec.targets:
            if target.kind is TargetKind.DAX:
                continue
            series = obs[target.kind]
            if series is None:
                continue
            variable = NWP_VARIABLE_FOR_TARGET[target.kind]
            family = FAMILY_FOR_TARGET[target.kind]
            for horizon in target.horizons:
                rec_now = nwp.get(variable, anchor, horizon.magnitude)
                if rec_now is None:
                    continue
                means, variances, ys = [], [], []
                for init in nwp.init_times(variable):
                    rec = nwp.get(variable, init, horizon.magnitude)
                    if rec is None or rec.valid_time > anchor:
                        continue
                    if (
                        cfg.station_cutover is not None
                        and not cfg.allow_mixed_station_training
                        and init.date() < cfg.station_cutover
                    ):
                        continue
                    ob = series.get(rec.valid_time)
                    if ob.value is None:
                        continue
                    members = np.asarray(rec.members)
                    means.append(float(members.mean()))
                    variances.append(float(members.var(ddof=1)))
                    ys.append(ob.value)
                if len(ys) < cfg.emos_min_train:
                    notes.append(
                        CellNote(
                            target.kind.value,
                            horizon.label,
                            f"emos skipped: {len(ys)} training pairs < {cfg.emos_min_train}",
                        )
                    )
                    continue
                try:
                    params = emos_fit(
                        means, variances, ys, family, fitted_at=spec.round_date
                    )
                except FitError as exc:
                    notes.append(
                        CellNote(target.kind.value, horizon.label, f"emos skipped: {exc}")
                    )
                    continue
                members = np.asarray(rec_now.members)
                quantiles = emos_predict(
                    params, float(members.mean()), float(members.var(ddof=1))
                )
                fc = QuantileForecast(
                    target, horizon, spec.round_date, tuple(float(q) for q in quantiles)
                )
                if target.kind is TargetKind.WIND:
                    fc = fc.floor_at_zero()
                forecasts[(target.kind, horizon.label)] = fc
                params_out[(target.kind, horizon.label)] = params
        return forecasts, params_out, notes

    # ------------------------------------------------------------------ leaderboard

    def all_score_records(self) -> list[ScoreRecord]:
        records: list[ScoreRecord] = []
        for round_date, state in sorted(self.store.round_states().items()):
            if state != "scored":
                continue
            path = self.store.scores_path(round_date)
            if path.is_file():
                records.extend(scores_from_csv(path.read_text(encoding="utf-8")))
        return records

    def missed_rounds(self) -> dict[str, int]:
        """Per alias: scored rounds without an accepted submission."""
        states = self.store.round_states()
        scored = [d for d, s in sorted(states.items()) if s == "scored"]
        participants: set[str] = set()
        per_round: dict[date, set[str]] = {}
        for d in scored:
            aliases = set(self._read_manifest(d)["effective"])
            per_round[d] = aliases
            participants.update(aliases)
        return {
            alias: sum(1 for d in scored if alias not in per_round[d])
            for alias in sorted(participants)
        }

    def _rebuild_leaderboard(self) -> None:
        doc = self.build_leaderboard_doc()
        self.store.atomic_write_text(self.store.leaderboard_json_path, dump_json(doc))
        self.store.atomic_write_text(
            self.store.leaderboard_csv_path, leaderboard_csv(doc)
        )

    def build_leaderboard_doc(self) -> dict:
        """Full leaderboard document (entries, references, diagnostics)."""
        cfg = self.config
        records = self.all_score_records()
        participant_records = [r for r in records if r.participant not in RESERVED_ALIASES]
        bench_records = [r for r in records if r.participant == BENCHMARK_ALIAS]

        scored_rounds = [
            d for d, s in sorted(self.store.round_states().items()) if s == "scored"
        ]

        # Cell round sets follow the benchmark: a round belongs to a cell's
        # evaluation sample iff the benchmark was scored there (observation
        # present), which drops e.g. holiday cells for everyone symmetrically.
        cell_rounds: dict[tuple[TargetKind, str], list[date]] = {}
        for r in bench_records:
            cell_rounds.setdefault(r.cell, []).append(r.round_date)

        per_cell_scores: dict[tuple[TargetKind, str], dict[str, dict[date, float]]] = {}
        participants = sorted({r.participant for r in participant_records})
        for cell, rounds in cell_rounds.items():
            rounds_set = set(rounds)
            cell_map: dict[str, dict[date, float]] = {a: {} for a in participants}
            for r in participant_records:
                if r.cell == cell and r.round_date in rounds_set:
                    cell_map[r.participant][r.round_date] = r.mean_quantile_score
            per_cell_scores[cell] = cell_map

        entries = []
        if participants and per_cell_scores:
            completed = {
                cell: impute_missing(cell_map, sorted(cell_rounds[cell]))
                for cell, cell_map in per_cell_scores.items()
            }
            matrix = rank_cells(completed)
            ranking = overall_ranking(matrix, seed=cfg.seed)
            misses = self.missed_rounds()
            diag = aggregate(participant_records, bench_records)
            skill_by_alias = _skill_by_target(diag)
            coverage_by_alias = _coverage_by_alias(participant_records)
            for entry in ranking:
                alias = entry.alias
                entries.append(
                    {
                        "alias": alias,
                        "position": entry.final_position,
                        "average_rank": entry.average_rank,
                        "best_rank": entry.best_rank,
                        "temperature_average_rank": entry.temperature_average_rank,
                        "tiebreak": entry.tiebreak_applied.value,
                        "missed_rounds": misses.get(alias, 0),
                        "exceeded_skip_allowance": misses.get(alias, 0) > ALLOWED_MISSES,
                        "skill_by_target": skill_by_alias.get(alias, {}),
                        "mean_skill_by_target": _mean_skill_by_target(
                            skill_by_alias.get(alias, {})
                        ),
                        "coverage": coverage_by_alias.get(alias),
                    }
                )

        references = []
        reference_records = [r for r in records if r.participant in RESERVED_ALIASES]
        if reference_records:
            diag_ref = aggregate(reference_records, bench_records)
            skill_ref = _skill_by_target(diag_ref)
            coverage_ref = _coverage_by_alias(reference_records)
            for alias in sorted({r.participant for r in reference_records}):
                references.append(
                    {
                        "alias": alias,
                        "skill_by_target": skill_ref.get(alias, {}),
                        "mean_skill_by_target": _mean_skill_by_target(
                            skill_ref.get(alias, {})
                        ),
                        "coverage": coverage_ref.get(alias),
                    }
                )

        return {
            "seed": cfg.seed,
            "rounds_included": [d.isoformat() for d in scored_rounds],
            "entries": entries,
            "references": references,
        }

    # ------------------------------------------------------------------ analyses

    def coverage_table(self) -> list[dict]:
        """Coverage rates per (alias, target, horizon) over scored rounds."""
        records = self.all_score_records()
        by_cell: dict[tuple[str, TargetKind, str], list[ScoreRecord]] = {}
        for r in records:
            by_cell.setdefault((r.participant, r.target_kind, r.horizon_label), []).append(r)
        rows = []
        for (alias, kind, label), cell_records in sorted(
            by_cell.items(), key=lambda kv: (kv[0][0], kv[0][1].value, kv[0][2])
        ):
            rate_50, rate_95 = coverage_rate(cell_records)
            rows.append(
                {
                    "alias": alias,
                    "target": kind.value,
                    "horizon": label,
                    "n": len(cell_records),
                    "coverage_50": rate_50,
                    "coverage_95": rate_95,
                }
            )
        return rows

    def share_beating_benchmark_table(self) -> list[dict]:
        records = self.all_score_records()
        participant_records = [r for r in records if r.participant not in RESERVED_ALIASES]
        bench_records = [r for r in records if r.participant == BENCHMARK_ALIAS]
        rounds_by_target: dict[TargetKind, set[date]] = {}
        for r in bench_records:
            rounds_by_target.setdefault(r.target_kind, set()).add(r.round_date)
        rows = []
        for kind in (TargetKind.DAX, TargetKind.TEMPERATURE, TargetKind.WIND):
            for round_date in sorted(rounds_by_target.get(kind, ())):
                n = len(
                    {
                        r.participant
                        for r in participant_records
                        if r.round_date == round_date and r.target_kind is kind
                    }
                )
                try:
                    share = share_beating_benchmark(
                        participant_records, bench_records, round_date, kind
                    )
                except RankingInputError:
                    share = None
                rows.append(
                    {
                        "target": kind.value,
                        "round": round_date.isoformat(),
                        "share": share,
                        "n_submitters": n,
                    }
                )
        return rows

    def evaluation_pair_count(self) -> int:
        """Number of (cell, round) pairs with an observed outcome."""
        return len({(r.target_kind, r.horizon_label, r.round_date) for r in self.all_score_records()})

    # ------------------------------------------------------------------ export

    def export(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        records = self.all_score_records()
        bench_records = [r for r in records if r.participant == BENCHMARK_ALIAS]
        targets = {
            "leaderboard.json": dump_json(self.build_leaderboard_doc()),
            "leaderboard.csv": leaderboard_csv(self.build_leaderboard_doc()),
            "scores.csv": scores_to_csv(records),
            "aggregates.csv": aggregates_to_csv(aggregate(records, bench_records)),
            "coverage.json": dump_json(self.coverage_table()),
            "share_beating_benchmark.json": dump_json(self.share_beating_benchmark_table()),
        }
        for name, text in targets.items():
            path = out / name
            self.store.atomic_write_text(path, text)
            written.append(path)
        return written


def _skill_by_target(rows: list[AggregateScore]) -> dict[str, dict[str, dict[str, float]]]:
    """alias -> target -> {horizon label: skill} from diagnostic aggregates."""
    out: dict[str, dict[str, dict[str, float]]] = {}
    for row in rows:
        out.setdefault(row.participant, {}).setdefault(row.target_kind.value, {})[
            row.horizon_label
        ] = row.skill
    return out


def _mean_skill_by_target(skill: dict[str, dict[str, float]]) -> dict[str, float]:
    """Across-horizon mean skill per target (clients display, never aggregate)."""
    return {
        target: sum(by_horizon.values()) / len(by_horizon)
        for target, by_horizon in skill.items()
        if by_horizon
    }


def _coverage_by_alias(records: list[ScoreRecord]) -> dict[str, dict[str, float]]:
    """Pooled 50%/95% coverage across all cells per alias, in percent."""
    by_alias: dict[str, list[ScoreRecord]] = {}
    for r in records:
        by_alias.setdefault(r.participant, []).append(r)
    out = {}
    for alias, rs in by_alias.items():
        n = len(rs)
        out[alias] = {
            "rate_50": 100.0 * sum(r.covered_50 for r in rs) / n,
            "rate_95": 100.0 * sum(r.covered_95 for r in rs) / n,
            "n": n,
        }
    return out


def leaderboard_csv(doc: dict) -> str:
    lines = ["position,alias,avg_rank,best_rank,temp_avg_rank,tiebreak"]
    for e in doc["entries"]:
        temp = e["temperature_average_rank"]
        lines.append(
            ",".join(
                [
                    str(e["position"]),
                    e["alias"],
                    repr(e["average_rank"]),
                    repr(e["best_rank"]),
                    repr(temp) if temp is not None else "",
                    e["tiebreak"],
                ]
            )
        )
    return "\n".join(lines) + "\n"
