"""Challenge configuration and the file-based store.

Everything the platform knows lives in one directory tree of CSV / JSON /
text files, auditable with standard tools::

    store/
      config.json
      rounds.json                     round state machine
      data/prices.csv
      data/observations_<target>.csv
      data/nwp/<init>.txt
      rounds/<date>/submissions/      content-addressed accepted files
      rounds/<date>/manifest.json     ingest audit (append-only)
      rounds/<date>/derived/          platform-generated forecasts
      rounds/<date>/emos/             fitted parameter audit files
      rounds/<date>/scores.csv
      leaderboard.json, leaderboard.csv

Writes go through write-new-then-atomic-rename, so a killed process never
leaves a partially visible file. A lock file serializes writers; the
read-only HTTP service runs without the lock.
"""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

from ..core import ALL_TARGETS, DAX_TARGET, Target, WEDNESDAY


class StoreError(RuntimeError):
    """The store is missing, locked or inconsistent."""


class ConfigError(ValueError):
    """The configuration file is malformed."""


ROUND_STATES = ("open", "closed", "scored")


@dataclass(frozen=True)
class ChallengeConfig:
    """Season-level settings, parsed from a plain key-value text file."""

    station_id: str
    season_start: date
    season_end: date
    weather_start: date | None = None
    station_cutover: date | None = None
    skip_dates: tuple[date, ...] = ()
    seed: int = 42
    dax_window_days: int = 1000
    emos_min_train: int = 30
    allow_mixed_station_training: bool = False

    def __post_init__(self):
        if self.season_start.weekday() != WEDNESDAY:
            raise ConfigError("season_start must be a Wednesday")
        if self.season_end.weekday() != WEDNESDAY:
            raise ConfigError("season_end must be a Wednesday")
        if self.season_end < self.season_start:
            raise ConfigError("season_end before season_start")

    def round_dates(self) -> list[date]:
        """All Wednesdays of the season, minus configured breaks."""
        out = []
        d = self.season_start
        while d <= self.season_end:
            if d not in self.skip_dates:
                out.append(d)
            d += timedelta(days=7)
        return out

    def targets_for(self, round_date: date) -> tuple[Target, ...]:
        """Active targets of a round (DAX only before the weather feed start)."""
        if self.weather_start is not None and round_date < self.weather_start:
            return (DAX_TARGET,)
        return ALL_TARGETS


_CONFIG_KEYS = {
    "station_id",
    "station_cutover",
    "season_start",
    "weather_start",
    "season_end",
    "skip_dates",
    "seed",
    "dax_window_days",
    "emos_min_train",
    "allow_mixed_station_training",
}


def parse_config_text(text: str) -> ChallengeConfig:
    """Parse the ``key = value`` configuration format ('#' starts a comment)."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        raw[key] = value.strip()

    def required(key: str) -> str:
        if key not in raw or not raw[key]:
            raise ConfigError(f"missing required key {key!r}")
        return raw[key]

    def optional_date(key: str) -> date | None:
        v = raw.get(key, "")
        return date.fromisoformat(v) if v else None

    skip: tuple[date, ...] = ()
    if raw.get("skip_dates"):
        skip = tuple(date.fromisoformat(v.strip()) for v in raw["skip_dates"].split(",") if v.strip())

    try:
        return ChallengeConfig(
            station_id=required("station_id"),
            season_start=date.fromisoformat(required("season_start")),
            season_end=date.fromisoformat(required("season_end")),
            weather_start=optional_date("weather_start"),
            station_cutover=optional_date("station_cutover"),
            skip_dates=skip,
            seed=int(raw.get("seed", "42")),
            dax_window_days=int(raw.get("dax_window_days", "1000")),
            emos_min_train=int(raw.get("emos_min_train", "30")),
            allow_mixed_station_training=raw.get("allow_mixed_station_training", "false").lower()
            in ("true", "1", "yes"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def config_to_json(cfg: ChallengeConfig) -> dict:
    return {
        "station_id": cfg.station_id,
        "station_cutover": cfg.station_cutover.isoformat() if cfg.station_cutover else None,
        "season_start": cfg.season_start.isoformat(),
        "weather_start": cfg.weather_start.isoformat() if cfg.weather_start else None,
        "season_end": cfg.season_end.isoformat(),
        "skip_dates": [d.isoformat() for d in cfg.skip_dates],
        "seed": cfg.seed,
        "dax_window_days": cfg.dax_window_days,
        "emos_min_train": cfg.emos_min_train,
        "allow_mixed_station_training": cfg.allow_mixed_station_training,
    }


def config_from_json(doc: dict) -> ChallengeConfig:
    return ChallengeConfig(
        station_id=doc["station_id"],
        season_start=date.fromisoformat(doc["season_start"]),
        season_end=date.fromisoformat(doc["season_end"]),
        weather_start=date.fromisoformat(doc["weather_start"]) if doc.get("weather_start") else None,
        station_cutover=date.fromisoformat(doc["station_cutover"]) if doc.get("station_cutover") else None,
        skip_dates=tuple(date.fromisoformat(d) for d in doc.get("skip_dates", [])),
        seed=doc.get("seed", 42),
        dax_window_days=doc.get("dax_window_days", 1000),
        emos_min_train=doc.get("emos_min_train", 30),
        allow_mixed_station_training=doc.get("allow_mixed_station_training", False),
    )


def dump_json(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


@dataclass
class Store:
    """Paths and primitive I/O for one challenge store directory."""

    root: Path

    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- layout ------------------------------------------------------------

    @property
    def config_path(self) -> Path:
        return self.root / "config.json"

    @property
    def rounds_index_path(self) -> Path:
        return self.root / "rounds.json"

    @property
    def data_dir(self) -> Path:
        return self.root / "data"

    @property
    def prices_path(self) -> Path:
        return self.data_dir / "prices.csv"

    def observations_path(self, target_name: str) -> Path:
        return self.data_dir / f"observations_{target_name}.csv"

    @property
    def nwp_dir(self) -> Path:
        return self.data_dir / "nwp"

    def round_dir(self, round_date: date) -> Path:
        return self.root / "rounds" / round_date.isoformat()

    def submissions_dir(self, round_date: date) -> Path:
        return self.round_dir(round_date) / "submissions"

    def manifest_path(self, round_date: date) -> Path:
        return self.round_dir(round_date) / "manifest.json"

    def derived_dir(self, round_date: date) -> Path:
        return self.round_dir(round_date) / "derived"

    def emos_dir(self, round_date: date) -> Path:
        return self.round_dir(round_date) / "emos"

    def scores_path(self, round_date: date) -> Path:
        return self.round_dir(round_date) / "scores.csv"

    @property
    def leaderboard_json_path(self) -> Path:
        return self.root / "leaderboard.json"

    @property
    def leaderboard_csv_path(self) -> Path:
        return self.root / "leaderboard.csv"

    # -- primitives ----------------------------------------------------------

    def exists(self) -> bool:
        return self.config_path.is_file()

    def initialize(self, cfg: ChallengeConfig) -> None:
        if self.exists():
            raise StoreError(f"store already initialized at {self.root}")
        self.root.mkdir(parents=True, exist_ok=True)
        self.data_dir.mkdir(exist_ok=True)
        self.nwp_dir.mkdir(exist_ok=True)
        (self.root / "rounds").mkdir(exist_ok=True)
        self.atomic_write_text(self.config_path, dump_json(config_to_json(cfg)))
        self.atomic_write_text(self.rounds_index_path, dump_json({}))

    def config(self) -> ChallengeConfig:
        if not self.exists():
            raise StoreError(f"no store at {self.root} (run 'hub init' first)")
        try:
            return config_from_json(json.loads(self.config_path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise StoreError(f"corrupt config at {self.config_path}: {exc}") from exc

    def atomic_write_text(self, path: Path, text: str) -> None:
        self.atomic_write_bytes(path, text.encode("utf-8"))

    def atomic_write_bytes(self, path: Path, data: bytes) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def read_json(self, path: Path):
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise
        except json.JSONDecodeError as exc:
            raise StoreError(f"corrupt JSON at {path}: {exc}") from exc

    # -- round state machine ---------------------------------------------------

    def round_states(self) -> dict[date, str]:
        if not self.rounds_index_path.is_file():
            return {}
        doc = self.read_json(self.rounds_index_path)
        return {date.fromisoformat(k): v["state"] for k, v in doc.items()}

    def set_round_state(self, round_date: date, state: str) -> None:
        if state not in ROUND_STATES:
            raise ValueError(f"unknown round state {state!r}")
        doc = {}
        if self.rounds_index_path.is_file():
            doc = self.read_json(self.rounds_index_path)
        key = round_date.isoformat()
        current = doc.get(key, {}).get("state")
        if current is not None:
            allowed = {
                "open": {"open", "closed", "scored"},
                "closed": {"closed", "scored"},
                "scored": {"scored"},
            }[current]
            if state not in allowed:
                raise StoreError(f"round {key} cannot move from {current} to {state}")
        doc[key] = {"state": state}
        self.atomic_write_text(self.rounds_index_path, dump_json(doc))

    # -- locking ---------------------------------------------------------------

    @property
    def lock_path(self) -> Path:
        return self.root / ".lock"

    @contextmanager
    def writer_lock(self):
        """One writer at a time; readers never take the lock."""
        self.root.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreError(
                f"store is locked by another writer ({self.lock_path}); "
                "remove the file if that process is gone"
            ) from None
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield
        finally:
            try:
                self.lock_path.unlink()
            except FileNotFoundError:
                pass
