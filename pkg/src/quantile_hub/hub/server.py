"""Read-only JSON API over the file-based store.

Endpoints (all GET, all JSON):

* ``/api/rounds``                              round dates and states
* ``/api/leaderboard``                         current leaderboard document
* ``/api/forecasts?target=<t>&round=<date>``   all aliases' forecasts + outcomes
* ``/api/observations?target=<t>``             full observation series
* ``/api/scores?target=<t>[&horizon=<h>]``     per-alias mean scores and skill
* ``/api/analysis/coverage``                   coverage rates per alias/cell
* ``/api/analysis/share-beating-benchmark``    weekly outperformance shares

The service never mutates the store; every request reads the current
snapshot, so it can run alongside the operator CLI.
"""

from __future__ import annotations

import json
from datetime import date
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..core import TargetKind, format_utc, resolve_valid_time, target_for_name
from ..scoring import aggregate
from ..submissions import RESERVED_ALIASES
from .pipeline import BENCHMARK_ALIAS, Hub
from .state import Store, StoreError


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _parse_date(params: dict, key: str) -> date:
    values = params.get(key)
    if not values:
        raise ApiError(400, f"missing query parameter {key!r}")
    try:
        return date.fromisoformat(values[0])
    except ValueError:
        raise ApiError(400, f"bad date {values[0]!r} for {key!r}") from None


def _parse_target(params: dict) -> TargetKind:
    values = params.get("target")
    if not values:
        raise ApiError(400, "missing query parameter 'target'")
    try:
        return TargetKind(values[0])
    except ValueError:
        raise ApiError(400, f"unknown target {values[0]!r}") from None


class HubApi:
    """Route handlers, separated from HTTP plumbing for direct testing."""

    def __init__(self, hub: Hub):
        self.hub = hub

    def handle(self, path: str, params: dict) -> object:
        if path == "/api/rounds":
            return self.rounds()
        if path == "/api/leaderboard":
            return self.leaderboard()
        if path == "/api/forecasts":
            return self.forecasts(_parse_target(params), _parse_date(params, "round"))
        if path == "/api/observations":
            return self.observations(_parse_target(params))
        if path == "/api/scores":
            horizon = params.get("horizon", [None])[0]
            return self.scores(_parse_target(params), horizon)
        if path == "/api/analysis/coverage":
            return self.hub.coverage_table()
        if path == "/api/analysis/share-beating-benchmark":
            return self.hub.share_beating_benchmark_table()
        raise ApiError(404, f"unknown endpoint {path}")

    def rounds(self) -> list[dict]:
        cfg = self.hub.config
        states = self.hub.store.round_states()
        out = []
        for d in cfg.round_dates():
            entry = {
                "round": d.isoformat(),
                "state": states.get(d, "pending"),
                "targets": [t.kind.value for t in cfg.targets_for(d)],
            }
            if d in states:
                entry["accepted_aliases"] = sorted(
                    self.hub._read_manifest(d)["effective"]
                )
            out.append(entry)
        return out

    def leaderboard(self) -> dict:
        path = self.hub.store.leaderboard_json_path
        if not path.is_file():
            raise ApiError(404, "no leaderboard yet (no round has been scored)")
        return self.hub.store.read_json(path)

    def forecasts(self, kind: TargetKind, round_date: date) -> dict:
        states = self.hub.store.round_states()
        if round_date not in states:
            raise ApiError(404, f"unknown round {round_date}")
        spec = self.hub.round_spec(round_date)
        target = target_for_name(kind.value)
        if target not in spec.targets:
            raise ApiError(404, f"target {kind.value} was not active in round {round_date}")

        by_alias: dict[str, list[dict]] = {}
        subs = self.hub.effective_submissions(round_date)
        derived_dir = self.hub.store.derived_dir(round_date)
        if derived_dir.is_dir():
            from ..submissions import parse_submission, parse_submission_filename

            for path in sorted(derived_dir.iterdir()):
                try:
                    _, alias = parse_submission_filename(path.name)
                except ValueError:
                    continue
                sub, _ = parse_submission(path.read_bytes(), spec, alias, allow_reserved=True)
                if sub is not None:
                    subs[alias] = sub

        level_names = None
        for alias, sub in sorted(subs.items()):
            rows = []
            for row in sub.rows:
                if row.target.kind is not kind:
                    continue
                if level_names is None:
                    level_names = row.levels.column_names()
                rows.append(
                    {
                        "horizon": row.horizon.label,
                        "valid_time": format_utc(resolve_valid_time(spec, row.target, row.horizon)),
                        "quantiles": dict(zip(row.levels.column_names(), row.quantiles)),
                    }
                )
            if rows:
                by_alias[alias] = rows

        prices = self.hub._prices()
        obs_series = {
            TargetKind.TEMPERATURE: self.hub._observations(TargetKind.TEMPERATURE),
            TargetKind.WIND: self.hub._observations(TargetKind.WIND),
        }
        outcomes, _ = self.hub._outcomes(
            spec, prices, obs_series
        )
        observations = []
        for horizon in target.horizons:
            observations.append(
                {
                    "horizon": horizon.label,
                    "valid_time": format_utc(resolve_valid_time(spec, target, horizon)),
                    "value": outcomes.get((kind, horizon.label)),
                }
            )

        return {
            "target": kind.value,
            "round": round_date.isoformat(),
            "reserved_aliases": sorted(RESERVED_ALIASES & set(by_alias)),
            "forecasts": by_alias,
            "observations": observations,
        }

    def observations(self, kind: TargetKind) -> dict:
        if kind is TargetKind.DAX:
            prices = self.hub._prices()
            if prices is None:
                raise ApiError(404, "no price data loaded")
            return {
                "target": kind.value,
                "series": [
                    {"date": d.isoformat(), "close": p}
                    for d, p in zip(prices.dates, prices.closes)
                ],
            }
        series = self.hub._observations(kind)
        if series is None:
            raise ApiError(404, f"no observation data loaded for {kind.value}")
        return {
            "target": kind.value,
            "series": [
                {"valid_time": format_utc(ts), "value": series.values[ts]}
                for ts in series.timestamps()
            ],
        }

    def scores(self, kind: TargetKind, horizon: str | None) -> list[dict]:
        records = self.hub.all_score_records()
        bench = [r for r in records if r.participant == BENCHMARK_ALIAS]
        rows = aggregate(records, bench)
        out = []
        for row in rows:
            if row.target_kind is not kind:
                continue
            if horizon is not None and row.horizon_label != horizon:
                continue
            out.append(
                {
                    "alias": row.participant,
                    "target": row.target_kind.value,
                    "horizon": row.horizon_label,
                    "n_rounds": row.n_rounds,
                    "mean_score": row.mean_score,
                    "skill": row.skill,
                    "is_reference": row.participant in RESERVED_ALIASES,
                }
            )
        return out


def make_handler(api: HubApi):
    class Handler(BaseHTTPRequestHandler):
        server_version = "quantile-hub"

        def do_GET(self):  # noqa: N802  (http.server naming)
            parsed = urlparse(self.path)
            try:
                body = api.handle(parsed.path, parse_qs(parsed.query))
                payload = json.dumps(body, sort_keys=True).encode("utf-8")
                status = 200
            except ApiError as exc:
                payload = json.dumps({"error": exc.message}).encode("utf-8")
                status = exc.status
            except StoreError as exc:
                payload = json.dumps({"error": str(exc)}).encode("utf-8")
                status = 500
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, fmt, *args):
            pass  # quiet by default; operators watch the CLI

    return Handler


def serve(store_root: str, port: int, host: str = "127.0.0.1") -> None:
    """Run the read-only API until interrupted.

    Refuses to start when the store is missing or its config is corrupt.
    """
    store = Store(store_root)
    if not store.exists():
        raise StoreError(f"no store at {store_root}; run 'hub init' first")
    store.config()  # validates; raises StoreError with diagnostics if corrupt
    hub = Hub(store)
    httpd = ThreadingHTTPServer((host, port), make_handler(HubApi(hub)))
    try:
        httpd.serve_forever()
    finally:
        httpd.server_close()
