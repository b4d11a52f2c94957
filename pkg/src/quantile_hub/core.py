"""Domain types shared by every part of the platform.

A challenge round is identified by a Wednesday submission date. Each round
asks for five predictive quantiles per (target, horizon) cell: accumulated
DAX log-returns at 1/2/5/6/7 calendar days and station temperature / wind
speed at 36/48/60/72/84 hours after the Wednesday 00:00 UTC reference time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from enum import Enum

UTC = timezone.utc

WEDNESDAY = 2  # date.weekday() value


class InvalidForecastError(ValueError):
    """A quantile forecast violates an invariant (ordering, finiteness)."""


class InvalidRoundError(ValueError):
    """A round specification violates the weekly calendar rules."""


class UnknownHorizonError(ValueError):
    """Horizon is not part of the target's registered horizon set."""


@dataclass(frozen=True)
class QuantileLevels:
    """The fixed set of probability levels every forecast must cover.

    Exactly five levels, strictly increasing, each in the open unit
    interval. Fixed for the lifetime of a challenge configuration.
    """

    levels: tuple[float, ...] = (0.025, 0.25, 0.5, 0.75, 0.975)

    def __post_init__(self):
        if len(self.levels) != 5:
            raise ValueError(f"expected 5 quantile levels, got {len(self.levels)}")
        for lo, hi in zip(self.levels, self.levels[1:]):
            if not lo < hi:
                raise ValueError("quantile levels must be strictly increasing")
        if not all(0.0 < a < 1.0 for a in self.levels):
            raise ValueError("quantile levels must lie in (0, 1)")

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    def column_names(self) -> tuple[str, ...]:
        """Header labels used in the submission wire format (q0.025, ...)."""
        return tuple(f"q{_format_level(a)}" for a in self.levels)


def _format_level(a: float) -> str:
    s = repr(a)
    return s.rstrip("0").rstrip(".") if "." in s else s


DEFAULT_LEVELS = QuantileLevels()


class TargetKind(str, Enum):
    DAX = "DAX"
    TEMPERATURE = "temperature"
    WIND = "wind"


class HorizonUnit(str, Enum):
    DAY = "day"
    HOUR = "hour"


@dataclass(frozen=True)
class Horizon:
    """A forecast lead time.

    For DAX the magnitude counts calendar days from the round date and
    ``trading_steps`` counts the Monday-Friday trading days that span;
    for weather the magnitude counts hours from Wednesday 00:00 UTC.
    """

    magnitude: int
    unit: HorizonUnit
    trading_steps: int | None = None

    def __post_init__(self):
        if self.magnitude <= 0:
            raise ValueError("horizon magnitude must be positive")
        if self.unit is HorizonUnit.HOUR and self.magnitude % 12 != 0:
            raise ValueError("hourly horizons must be multiples of 12 hours")
        if self.trading_steps is not None and self.trading_steps <= 0:
            raise ValueError("trading_steps must be positive")

    @property
    def label(self) -> str:
        """Wire-format label, e.g. ``1 day`` or ``36 hour``."""
        return f"{self.magnitude} {self.unit.value}"


@dataclass(frozen=True)
class Target:
    """A forecast target variable with its fixed horizon set."""

    kind: TargetKind
    unit: str
    horizons: tuple[Horizon, ...]

    def horizon_for_label(self, label: str) -> Horizon:
        for h in self.horizons:
            if h.label == label:
                return h
        raise UnknownHorizonError(f"unknown horizon {label!r} for target {self.kind.value}")

    @property
    def horizon_labels(self) -> tuple[str, ...]:
        return tuple(h.label for h in self.horizons)


# Calendar horizons 1,2,5,6,7 from a Wednesday land on Thu, Fri, Mon, Tue,
# Wed and therefore span 1..5 trading days.
DAX_TARGET = Target(
    kind=TargetKind.DAX,
    unit="percent log-return",
    horizons=(
        Horizon(1, HorizonUnit.DAY, trading_steps=1),
        Horizon(2, HorizonUnit.DAY, trading_steps=2),
        Horizon(5, HorizonUnit.DAY, trading_steps=3),
        Horizon(6, HorizonUnit.DAY, trading_steps=4),
        Horizon(7, HorizonUnit.DAY, trading_steps=5),
    ),
)

_WEATHER_HORIZONS = tuple(Horizon(h, HorizonUnit.HOUR) for h in (36, 48, 60, 72, 84))

TEMPERATURE_TARGET = Target(TargetKind.TEMPERATURE, "degC", _WEATHER_HORIZONS)
WIND_TARGET = Target(TargetKind.WIND, "km/h", _WEATHER_HORIZONS)

ALL_TARGETS: tuple[Target, ...] = (DAX_TARGET, TEMPERATURE_TARGET, WIND_TARGET)

TARGETS_BY_KIND: dict[TargetKind, Target] = {t.kind: t for t in ALL_TARGETS}


def target_for_name(name: str) -> Target:
    """Resolve the wire-format target name (``DAX``/``temperature``/``wind``)."""
    for t in ALL_TARGETS:
        if t.kind.value == name:
            return t
    raise KeyError(f"unknown target {name!r}")


@dataclass(frozen=True)
class QuantileForecast:
    """Five predictive quantiles for one (target, horizon, round) cell.

    Values are in target units and must be finite and non-decreasing
    across levels. Wind forecasts produced by the platform itself are
    additionally floored at zero; participant files may carry negative
    wind quantiles (flagged at validation, clamped at scoring time).
    """

    target: Target
    horizon: Horizon
    round_date: date
    quantiles: tuple[float, ...]
    levels: QuantileLevels = DEFAULT_LEVELS

    def __post_init__(self):
        if len(self.quantiles) != len(self.levels):
            raise InvalidForecastError(
                f"expected {len(self.levels)} quantiles, got {len(self.quantiles)}"
            )
        object.__setattr__(self, "quantiles", tuple(float(q) for q in self.quantiles))
        if not all(math.isfinite(q) for q in self.quantiles):
            raise InvalidForecastError("quantiles must be finite")
        for lo, hi in zip(self.quantiles, self.quantiles[1:]):
            if hi < lo:
                raise InvalidForecastError(
                    f"quantiles must be non-decreasing across levels, got {self.quantiles}"
                )

    @property
    def cell(self) -> tuple[TargetKind, str]:
        return (self.target.kind, self.horizon.label)

    def floor_at_zero(self) -> "QuantileForecast":
        """Copy with all quantiles clamped to be nonnegative."""
        return QuantileForecast(
            self.target,
            self.horizon,
            self.round_date,
            tuple(max(q, 0.0) for q in self.quantiles),
            self.levels,
        )


class ObservationStatus(str, Enum):
    OBSERVED = "observed"
    MISSING = "missing"


@dataclass(frozen=True)
class Observation:
    """A realized value (or a recorded gap) for one target at one time."""

    target: Target
    valid_time: datetime
    value: float | None
    status: ObservationStatus = ObservationStatus.OBSERVED

    def __post_init__(self):
        if self.status is ObservationStatus.MISSING and self.value is not None:
            raise ValueError("missing observations carry no value")
        if self.status is ObservationStatus.OBSERVED:
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("observed values must be finite")


@dataclass(frozen=True)
class RoundSpec:
    """One weekly submission round.

    ``targets`` is normally all three targets (15 expected rows); early
    season rounds may run with a subset (e.g. DAX only before the weather
    data feed started).
    """

    round_date: date
    targets: tuple[Target, ...] = ALL_TARGETS

    def __post_init__(self):
        if self.round_date.weekday() != WEDNESDAY:
            raise InvalidRoundError(f"round date {self.round_date} is not a Wednesday")
        if not self.targets:
            raise InvalidRoundError("a round needs at least one target")

    @property
    def deadline(self) -> datetime:
        """Submission deadline: 23:59 local on the round date."""
        return datetime.combine(self.round_date, time(23, 59))

    @property
    def expected_row_count(self) -> int:
        return sum(len(t.horizons) for t in self.targets)

    def expected_cells(self) -> list[tuple[Target, Horizon]]:
        """The (target, horizon) cross product in canonical file order."""
        return [(t, h) for t in self.targets for h in t.horizons]


def resolve_valid_time(round_spec: RoundSpec, target: Target, horizon: Horizon) -> datetime:
    """Map a (round, target, horizon) cell to the UTC time it predicts.

    Weather horizons are anchored at the round date 00:00 UTC (the NWP
    initialization time). DAX horizons resolve to midnight UTC of the
    target calendar date; the predicted quantity is that trading day's
    close-to-anchor accumulated log-return.
    """
    if horizon not in target.horizons:
        raise UnknownHorizonError(
            f"horizon {horizon.label!r} not registered for target {target.kind.value}"
        )
    anchor = datetime.combine(round_spec.round_date, time(0), tzinfo=UTC)
    if horizon.unit is HorizonUnit.DAY:
        return anchor + timedelta(days=horizon.magnitude)
    return anchor + timedelta(hours=horizon.magnitude)


def parse_utc(stamp: str) -> datetime:
    """Parse an ISO-8601 timestamp, accepting a trailing ``Z``, into UTC."""
    s = stamp.strip()
    if s.endswith("Z"):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC)


def format_utc(dt: datetime) -> str:
    """Render a UTC datetime as ISO-8601 with a trailing ``Z``."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=UTC)
    return dt.astimezone(UTC).strftime("%Y-%m-%dT%H:%M:%SZ")
