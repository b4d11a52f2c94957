"""Loaders for outcome and input data.

Three local file formats feed the platform:

* price CSV ``date,close`` (strictly increasing dates, positive closes),
* observation CSV ``timestamp_utc,value`` (ISO-8601 timestamps),
* NWP ensemble text files: a header line ``init_time=<ISO8601>`` followed
  by ``variable=<code> lead=<hours>`` blocks, each with one line of 40
  comma-separated member values.

All loaders are pure functions of file content, so re-loading a file is
idempotent.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path

from .core import (
    Observation,
    ObservationStatus,
    Target,
    TargetKind,
    parse_utc,
)


class DataFormatError(ValueError):
    """A data file violates its declared format."""


class InsufficientHistoryError(LookupError):
    """A computation needs more history than the loaded series provides."""


NWP_ENSEMBLE_SIZE = 40
NWP_MAX_LEAD_HOURS = 120

#: Variable codes carried by the daily ensemble files: the two target
#: variables plus five auxiliary fields.
NWP_VARIABLES = (
    "mslp",
    "cloud_cover",
    "radiation",
    "temperature_2m",
    "temperature_850hpa",
    "wind_10m",
    "gust_10m",
)

NWP_VARIABLE_FOR_TARGET = {
    TargetKind.TEMPERATURE: "temperature_2m",
    TargetKind.WIND: "wind_10m",
}


@dataclass(frozen=True)
class PriceSeries:
    """Daily closing prices on a trading calendar."""

    dates: tuple[date, ...]
    closes: tuple[float, ...]
    _index: dict[date, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.dates) != len(self.closes):
            raise DataFormatError("dates and closes must align")
        for lo, hi in zip(self.dates, self.dates[1:]):
            if hi <= lo:
                raise DataFormatError(f"dates must be strictly increasing near {hi}")
        for d, p in zip(self.dates, self.closes):
            if not (math.isfinite(p) and p > 0):
                raise DataFormatError(f"price on {d} must be a positive finite number")
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(self.dates)})

    def __len__(self) -> int:
        return len(self.dates)

    def __contains__(self, d: date) -> bool:
        return d in self._index

    def position(self, d: date) -> int:
        try:
            return self._index[d]
        except KeyError:
            raise InsufficientHistoryError(f"{d} is not a trading date in the series") from None

    def close(self, d: date) -> float:
        return self.closes[self.position(d)]

    def last_trading_date_on_or_before(self, d: date) -> date:
        """Most recent trading date <= d (the price anchor for a round)."""
        i = bisect_right(self.dates, d)
        if i == 0:
            raise InsufficientHistoryError(f"no trading date on or before {d}")
        return self.dates[i - 1]


def load_prices(path: str | Path) -> PriceSeries:
    """Load a ``date,close`` CSV into a validated price series."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "date,close":
        raise DataFormatError(f"{path}: expected header 'date,close'")
    dates: list[date] = []
    closes: list[float] = []
    seen: set[date] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise DataFormatError(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        try:
            d = date.fromisoformat(cells[0])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad date {cells[0]!r}") from exc
        if d in seen:
            raise DataFormatError(f"{path}:{lineno}: duplicate date {d}")
        seen.add(d)
        try:
            p = float(cells[1])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad price {cells[1]!r}") from exc
        if not (math.isfinite(p) and p > 0):
            raise DataFormatError(f"{path}:{lineno}: price must be positive, got {cells[1]}")
        dates.append(d)
        closes.append(p)
    try:
        return PriceSeries(tuple(dates), tuple(closes))
    except DataFormatError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def compute_return(prices: PriceSeries, t: date, trading_steps: int) -> float:
    """Accumulated log-return over the ``trading_steps`` days ending at ``t``.

    Returns ``100 * (ln P_t - ln P_{t-k})`` where the anchor is ``k``
    trading entries before ``t`` in the series.
    """
    if trading_steps <= 0:
        raise ValueError("trading_steps must be positive")
    i = prices.position(t)
    if i - trading_steps < 0:
        raise InsufficientHistoryError(
            f"need {trading_steps} trading days before {t}, have {i}"
        )
    return 100.0 * (math.log(prices.closes[i]) - math.log(prices.closes[i - trading_steps]))


def dax_outcome(prices: PriceSeries, round_date: date, horizon_days: int) -> float | None:
    """Realized accumulated log-return for one DAX cell, or None if missing.

    The anchor is the last close at or before the round date (Wednesday,
    or the prior trading day when Wednesday is a holiday). The target date
    is ``round_date + horizon_days``; if no close exists for it (exchange
    holiday) the observation is missing rather than shifted.
    """
    anchor = prices.last_trading_date_on_or_before(round_date)
    target_date = round_date + timedelta(days=horizon_days)
    if target_date not in prices:
        return None
    return 100.0 * (math.log(prices.close(target_date)) - math.log(prices.close(anchor)))


@dataclass(frozen=True)
class ObservationSeries:
    """Realized values for one target, keyed by UTC valid time."""

    target: Target
    values: dict[datetime, float]

    def get(self, valid_time: datetime) -> Observation:
        """Observation at a timestamp; gaps come back with status missing."""
        if valid_time in self.values:
            return Observation(self.target, valid_time, self.values[valid_time])
        return Observation(self.target, valid_time, None, ObservationStatus.MISSING)

    def timestamps(self) -> list[datetime]:
        return sorted(self.values)


def load_observations(path: str | Path, target: Target) -> ObservationSeries:
    """Load a ``timestamp_utc,value`` CSV for one target.

    Weather series are restricted to 00:00 / 12:00 UTC stamps (other rows
    are dropped); wind values must be nonnegative.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != "timestamp_utc,value":
        raise DataFormatError(f"{path}: expected header 'timestamp_utc,value'")
    values: dict[datetime, float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise DataFormatError(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        try:
            ts = parse_utc(cells[0])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad timestamp {cells[0]!r}") from exc
        try:
            v = float(cells[1])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad value {cells[1]!r}") from exc
        if not math.isfinite(v):
            raise DataFormatError(f"{path}:{lineno}: value must be finite")
        if target.kind is TargetKind.WIND and v < 0:
            raise DataFormatError(f"{path}:{lineno}: wind speed must be nonnegative, got {v}")
        if target.kind is not TargetKind.DAX:
            if ts.hour not in (0, 12) or ts.minute or ts.second:
                continue
        if ts in values:
            raise DataFormatError(f"{path}:{lineno}: duplicate timestamp {cells[0]}")
        values[ts] = v
    return ObservationSeries(target, values)


@dataclass(frozen=True)
class EnsembleNwpForecast:
    """One 40-member ensemble forecast for (variable, init time, lead)."""

    variable: str
    init_time: datetime
    lead_hours: int
    members: tuple[float, ...]

    def __post_init__(self):
        if self.variable not in NWP_VARIABLES:
            raise DataFormatError(f"unknown NWP variable {self.variable!r}")
        if len(self.members) != NWP_ENSEMBLE_SIZE:
            raise DataFormatError(
                f"expected {NWP_ENSEMBLE_SIZE} members, got {len(self.members)}"
            )
        if not all(math.isfinite(m) for m in self.members):
            raise DataFormatError("ensemble members must be finite")
        if not 0 <= self.lead_hours <= NWP_MAX_LEAD_HOURS:
            raise DataFormatError(f"lead must be in [0, {NWP_MAX_LEAD_HOURS}] hours")

    @property
    def valid_time(self) -> datetime:
        return self.init_time + timedelta(hours=self.lead_hours)


def load_nwp_file(path: str | Path) -> list[EnsembleNwpForecast]:
    """Parse one NWP ensemble text file into per-(variable, lead) records."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    content = [(n, line.strip()) for n, line in enumerate(lines, start=1) if line.strip()]
    if not content or not content[0][1].startswith("init_time="):
        raise DataFormatError(f"{path}: first line must be 'init_time=<ISO8601>'")
    try:
        init_time = parse_utc(content[0][1].split("=", 1)[1])
    except ValueError as exc:
        raise DataFormatError(f"{path}: bad init_time") from exc

    records: list[EnsembleNwpForecast] = []
    seen: set[tuple[str, int]] = set()
    i = 1
    while i < len(content):
        lineno, line = content[i]
        parts = line.split()
        if (
            len(parts) != 2
            or not parts[0].startswith("variable=")
            or not parts[1].startswith("lead=")
        ):
            raise DataFormatError(
                f"{path}:{lineno}: expected 'variable=<code> lead=<hours>', got {line!r}"
            )
        variable = parts[0].split("=", 1)[1]
        try:
            lead = int(parts[1].split("=", 1)[1])
        except ValueError as exc:
            raise DataFormatError(f"{path}:{lineno}: bad lead in {line!r}") from exc
        if (variable, lead) in seen:
            raise DataFormatError(f"{path}:{lineno}: duplicate block ({variable}, {lead})")
        seen.add((variable, lead))
        if i + 1 >= len(content):
            raise DataFormatError(f"{path}:{lineno}: block has no member line")
        mem_lineno, member_line = content[i + 1]
        try:
            members = tuple(float(c) for c in member_line.split(","))
        except ValueError as exc:
            raise DataFormatError(f"{path}:{mem_lineno}: non-numeric member value") from exc
        try:
            records.append(EnsembleNwpForecast(variable, init_time, lead, members))
        except DataFormatError as exc:
            raise DataFormatError(f"{path}:{mem_lineno}: {exc}") from exc
        i += 2
    return records


class NwpStore:
    """In-memory index of ensemble forecasts keyed by (variable, init, lead)."""

    def __init__(self):
        self._records: dict[tuple[str, datetime, int], EnsembleNwpForecast] = {}

    def add(self, records: list[EnsembleNwpForecast]) -> None:
        for rec in records:
            self._records[(rec.variable, rec.init_time, rec.lead_hours)] = rec

    def get(
        self, variable: str, init_time: datetime, lead_hours: int
    ) -> EnsembleNwpForecast | None:
        return self._records.get((variable, init_time, lead_hours))

    def init_times(self, variable: str) -> list[datetime]:
        return sorted({k[1] for k in self._records if k[0] == variable})

    def __len__(self) -> int:
        return len(self._records)
