#!/usr/bin/env python3
"""Walkthrough: the three reference forecasts.

* DAX: empirical quantiles of the 1000 most recent overlapping k-step
  accumulated log-returns.
* Weather: empirical quantiles of the raw 40-member ensemble.
* EMOS on top of the raw ensemble: a normal (or zero-truncated normal)
  predictive distribution whose location/scale are linear in the ensemble
  mean/variance, fitted by minimizing the closed-form CRPS.
"""

from datetime import date, datetime, timedelta, timezone

import numpy as np

from quantile_hub import (
    DEFAULT_LEVELS,
    PriceSeries,
    RoundSpec,
    TEMPERATURE_TARGET,
    crps_approx,
    dax_benchmark,
    emos_fit,
    emos_predict,
    empirical_quantiles,
    raw_ensemble_benchmark,
)
from quantile_hub.benchmarks import DistributionFamily
from quantile_hub.core import QuantileForecast
from quantile_hub.ingestion import EnsembleNwpForecast

rng = np.random.default_rng(7)
UTC = timezone.utc

# --- DAX: rolling return quantiles -----------------------------------------
print("== DAX benchmark ==")
n_days = 1400
log_returns = rng.normal(0.0002, 0.011, size=n_days)
closes = 14000.0 * np.exp(np.cumsum(log_returns))
d, dates = date(2016, 1, 4), []
while len(dates) < n_days:
    if d.weekday() < 5:
        dates.append(d)
    d += timedelta(days=1)
prices = PriceSeries(tuple(dates), tuple(float(c) for c in closes))

round_date = dates[-1]
while round_date.weekday() != 2:
    round_date -= timedelta(days=1)
for fc in dax_benchmark(prices, RoundSpec(round_date)):
    cells = ", ".join(f"{q:7.3f}" for q in fc.quantiles)
    print(f"  {fc.horizon.label:>6}: [{cells}]")

# --- weather: raw ensemble quantiles ----------------------------------------
print("\n== raw ensemble benchmark (temperature, 36 hour) ==")
truth = 9.3
members = truth + 1.5 + rng.normal(0, 1.0, size=40)  # biased, too sharp
nwp = EnsembleNwpForecast(
    "temperature_2m", datetime(2021, 11, 3, tzinfo=UTC), 36, tuple(float(m) for m in members)
)
raw = raw_ensemble_benchmark(nwp, TEMPERATURE_TARGET, date(2021, 11, 3))
print(f"  members: mean {members.mean():.2f}, truth {truth}")
print(f"  raw quantiles: {[round(q, 2) for q in raw.quantiles]}")

# --- EMOS: learn the bias and the dispersion --------------------------------
print("\n== EMOS post-processing ==")
n_train = 300
centers = rng.normal(8.0, 3.0, size=n_train)
train_members = centers[:, None] + 1.5 + rng.normal(0, 1.0, size=(n_train, 40))
train_y = rng.normal(centers, 1.3)

params = emos_fit(
    train_members.mean(axis=1),
    train_members.var(axis=1, ddof=1),
    train_y,
    DistributionFamily.NORMAL,
)
print(f"  fitted location: {params.a:+.3f} + {params.b:.3f} * ensemble_mean")

test_centers = rng.normal(8.0, 3.0, size=200)
test_members = test_centers[:, None] + 1.5 + rng.normal(0, 1.0, size=(200, 40))
test_y = rng.normal(test_centers, 1.3)


def forecast_from(quantiles):
    return QuantileForecast(
        TEMPERATURE_TARGET,
        TEMPERATURE_TARGET.horizons[0],
        date(2021, 11, 3),
        tuple(float(q) for q in quantiles),
    )


raw_scores, emos_scores = [], []
for row, y in zip(test_members, test_y):
    raw_scores.append(crps_approx(forecast_from(empirical_quantiles(row)), y))
    q = emos_predict(params, float(row.mean()), float(row.var(ddof=1)))
    emos_scores.append(crps_approx(forecast_from(q), y))

print(f"  mean score, raw ensemble: {np.mean(raw_scores):.4f}")
print(f"  mean score, EMOS:         {np.mean(emos_scores):.4f}")
print(f"  improvement: {100 * (1 - np.mean(emos_scores) / np.mean(raw_scores)):.1f}%")
print(f"  (levels: {tuple(DEFAULT_LEVELS)})")
