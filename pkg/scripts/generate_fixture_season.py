#!/usr/bin/env python3
"""Regenerate the bundled synthetic challenge season under fixtures/season/.

Everything is drawn from one seeded generator in a fixed iteration order,
so the fixture is bit-reproducible. The season mirrors the real-world
accounting that the test suite asserts on:

* 14 weekly DAX rounds (2021-10-27 .. 2022-02-09, two-week break),
* weather targets joining one week later (13 rounds),
* one exchange holiday (2022-01-06) that removes a single DAX
  forecast/observation pair, for 69 + 130 = 199 pairs in total,
* five participants with different styles, a few missed rounds, one
  malformed submission and naturally occurring negative wind quantiles.
"""

from __future__ import annotations

import shutil
from datetime import date, datetime, time, timedelta, timezone
from pathlib import Path
from statistics import NormalDist

import numpy as np

REPO_ROOT = Path(__file__).resolve().parents[1]
OUT = REPO_ROOT / "fixtures" / "season"

UTC = timezone.utc

SEASON_START = date(2021, 10, 27)
WEATHER_START = date(2021, 11, 3)
SEASON_END = date(2022, 2, 9)
SKIP_DATES = (date(2021, 12, 22), date(2021, 12, 29))
EXCHANGE_HOLIDAY = date(2022, 1, 6)  # Thursday: kills the (2022-01-05, 1 day) pair

PRICES_FROM = date(2017, 9, 4)
PRICES_TO = date(2022, 2, 18)

OBS_FROM = datetime(2021, 9, 10, 0, tzinfo=UTC)
OBS_TO = datetime(2022, 2, 18, 12, tzinfo=UTC)

NWP_HISTORY_FROM = date(2021, 9, 15)
NWP_HISTORY_TO = date(2021, 11, 2)  # daily pre-season inits; round Wednesdays after

LEVELS = (0.025, 0.25, 0.5, 0.75, 0.975)
Z = tuple(NormalDist().inv_cdf(a) for a in LEVELS)
LEADS = (36, 48, 60, 72, 84)

DAX_HORIZONS = ((1, 1), (2, 2), (5, 3), (6, 4), (7, 5))  # (calendar days, trading steps)

# alias -> (information weight, width multiplier, center bias)
PARTICIPANTS = {
    "arya": (0.85, 1.0, 0.0),
    "boromir": (0.60, 1.4, 0.5),
    "chewie": (0.30, 1.0, 1.5),
    "drogon": (0.00, 0.45, 0.0),
    "elmo": (0.70, 1.8, -0.5),
}

MISSED_ROUNDS = {
    "arya": {5},  # round indices (0-based)
    "boromir": {8, 9, 10},
}
MALFORMED = {("chewie", 3)}  # (alias, round index): non-monotone row


def round_dates():
    out = []
    d = SEASON_START
    while d <= SEASON_END:
        if d not in SKIP_DATES:
            out.append(d)
        d += timedelta(days=7)
    return out


def trading_days():
    out = []
    d = PRICES_FROM
    while d <= PRICES_TO:
        if d.weekday() < 5 and d != EXCHANGE_HOLIDAY:
            out.append(d)
        d += timedelta(days=1)
    return out


def build_prices(rng):
    days = trading_days()
    log_returns = rng.normal(0.0002, 0.011, size=len(days) - 1)
    closes = 13000.0 * np.exp(np.concatenate([[0.0], np.cumsum(log_returns)]))
    return dict(zip(days, closes))


def obs_stamps():
    out = []
    t = OBS_FROM
    while t <= OBS_TO:
        out.append(t)
        t += timedelta(hours=12)
    return out


def build_weather(rng):
    """AR(1) anomalies on top of a seasonal cycle, at 00/12 UTC stamps."""
    stamps = obs_stamps()
    n = len(stamps)
    temp_noise = np.zeros(n)
    wind_noise = np.zeros(n)
    for i in range(1, n):
        temp_noise[i] = 0.75 * temp_noise[i - 1] + rng.normal(0, 1.4)
        wind_noise[i] = 0.60 * wind_noise[i - 1] + rng.normal(0, 3.2)
    temperature = {}
    wind = {}
    for i, ts in enumerate(stamps):
        doy = ts.timetuple().tm_yday
        seasonal = 9.0 + 9.0 * np.cos(2 * np.pi * (doy - 200) / 365.25)
        diurnal = 2.2 if ts.hour == 12 else -2.2
        temperature[ts] = round(float(seasonal + diurnal + temp_noise[i]), 2)
        wind[ts] = round(float(max(0.0, 15.0 + 1.5 * np.sin(2 * np.pi * doy / 365.25) + wind_noise[i])), 2)
    return temperature, wind


def nwp_init_dates():
    out = []
    d = NWP_HISTORY_FROM
    while d <= NWP_HISTORY_TO:
        out.append(d)
        d += timedelta(days=1)
    out.extend(r for r in round_dates() if r >= WEATHER_START)
    return out


def lead_error_std(variable, lead):
    if variable == "temperature_2m":
        return 1.0 + lead / 84.0
    return 2.0 + lead / 42.0


def build_nwp(rng, temperature, wind):
    """Biased, underdispersed ensembles around the (future) observed truth."""
    files = {}
    for init_date in nwp_init_dates():
        init = datetime.combine(init_date, time(0), tzinfo=UTC)
        blocks = []
        for variable, series, bias, member_spread in (
            ("temperature_2m", temperature, 1.5, 1.0),
            ("wind_10m", wind, 3.0, 2.2),
        ):
            for lead in LEADS:
                valid = init + timedelta(hours=lead)
                truth = series[valid]
                shared_error = rng.normal(0.0, lead_error_std(variable, lead))
                members = truth + bias + shared_error + rng.normal(0, member_spread, 40)
                if variable == "wind_10m":
                    members = np.maximum(members, 0.0)
                blocks.append((variable, lead, members))
        # one auxiliary variable to keep the multi-variable format honest
        for lead in (36, 48):
            blocks.append(("cloud_cover", lead, rng.uniform(0.0, 100.0, 40)))
        files[init] = blocks
    return files


def k_step_return(prices_by_date, dates_sorted, end_date, k):
    i = dates_sorted.index(end_date)
    return 100.0 * (
        np.log(prices_by_date[dates_sorted[i]]) - np.log(prices_by_date[dates_sorted[i - k]])
    )


def participant_rows(rng, alias, round_date, targets, prices, dates_sorted, temperature, wind):
    w, width_mult, bias = PARTICIPANTS[alias]
    rows = []
    for target in targets:
        if target == "DAX":
            for days, steps in DAX_HORIZONS:
                valid = round_date + timedelta(days=days)
                truth = (
                    k_step_return(prices, dates_sorted, valid, steps)
                    if valid in prices
                    else 0.0
                )
                center = w * truth + bias * 0.2 + rng.normal(0, 0.25)
                width = width_mult * 1.1 * np.sqrt(steps)
                rows.append((target, f"{days} day", center, width))
        else:
            series = temperature if target == "temperature" else wind
            clim = 8.0 if target == "temperature" else 15.0
            for lead in LEADS:
                valid = datetime.combine(round_date, time(0), tzinfo=UTC) + timedelta(hours=lead)
                truth = series[valid]
                err = lead_error_std(
                    "temperature_2m" if target == "temperature" else "wind_10m", lead
                )
                center = w * truth + (1 - w) * clim + bias + rng.normal(0, 0.3)
                width = width_mult * err * (1.35 - 0.5 * w)
                rows.append((target, f"{lead} hour", center, width))
    return rows


def format_value(v):
    return repr(round(float(v), 4))


def submission_text(round_date, rows):
    lines = ["forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975"]
    for target, horizon, center, width in rows:
        quantiles = [center + width * z for z in Z]
        lines.append(
            ",".join([round_date.isoformat(), target, horizon, *map(format_value, quantiles)])
        )
    return "\n".join(lines) + "\n"


def main():
    if OUT.exists():
        shutil.rmtree(OUT)
    OUT.mkdir(parents=True)
    rng = np.random.default_rng(20211027)

    prices = build_prices(rng)
    dates_sorted = sorted(prices)
    temperature, wind = build_weather(rng)
    nwp = build_nwp(rng, temperature, wind)

    (OUT / "config.txt").write_text(
        "# synthetic challenge season for tests and demos\n"
        "station_id = 10384\n"
        f"season_start = {SEASON_START}\n"
        f"weather_start = {WEATHER_START}\n"
        f"season_end = {SEASON_END}\n"
        f"skip_dates = {','.join(d.isoformat() for d in SKIP_DATES)}\n"
        "seed = 42\n"
        "dax_window_days = 1000\n"
        "emos_min_train = 30\n",
        encoding="utf-8",
    )

    (OUT / "prices.csv").write_text(
        "date,close\n"
        + "".join(f"{d},{prices[d]:.2f}\n" for d in dates_sorted),
        encoding="utf-8",
    )
    for name, series in (("temperature", temperature), ("wind", wind)):
        (OUT / f"observations_{name}.csv").write_text(
            "timestamp_utc,value\n"
            + "".join(
                f"{ts.strftime('%Y-%m-%dT%H:%M:%SZ')},{series[ts]}\n" for ts in sorted(series)
            ),
            encoding="utf-8",
        )

    nwp_dir = OUT / "nwp"
    nwp_dir.mkdir()
    for init, blocks in sorted(nwp.items()):
        lines = [f"init_time={init.strftime('%Y-%m-%dT%H:%M:%SZ')}"]
        for variable, lead, members in blocks:
            lines.append(f"variable={variable} lead={lead}")
            lines.append(",".join(f"{m:.3f}" for m in members))
        (nwp_dir / init.strftime("%Y%m%dT%H%M%S.txt")).write_text(
            "\n".join(lines) + "\n", encoding="utf-8"
        )

    rounds = round_dates()
    negative_wind_seen = False
    for idx, round_date in enumerate(rounds):
        round_dir = OUT / "submissions" / round_date.isoformat()
        round_dir.mkdir(parents=True)
        targets = ["DAX"] if round_date < WEATHER_START else ["DAX", "temperature", "wind"]
        for alias in sorted(PARTICIPANTS):
            if idx in MISSED_ROUNDS.get(alias, set()):
                continue
            rows = participant_rows(
                rng, alias, round_date, targets, prices, dates_sorted, temperature, wind
            )
            text = submission_text(round_date, rows)
            if (alias, idx) in MALFORMED:
                # swap two quantile columns in the second data row
                lines = text.splitlines()
                cells = lines[2].split(",")
                cells[4], cells[6] = cells[6], cells[4]
                lines[2] = ",".join(cells)
                text = "\n".join(lines) + "\n"
            negative_wind_seen = negative_wind_seen or any(
                line.split(",")[1] == "wind" and float(line.split(",")[3]) < 0
                for line in text.splitlines()[1:]
            )
            (round_dir / f"{round_date.strftime('%Y%m%d')}_{alias}.csv").write_text(
                text, encoding="utf-8"
            )

    n_files = sum(1 for _ in (OUT / "submissions").rglob("*.csv"))
    print(f"wrote fixture season to {OUT}")
    print(f"  rounds: {len(rounds)} ({rounds[0]} .. {rounds[-1]})")
    print(f"  submission files: {n_files}")
    print(f"  nwp files: {len(nwp)}")
    print(f"  negative wind quantile present: {negative_wind_seen}")


if __name__ == "__main__":
    main()
