#!/usr/bin/env python3
"""Walkthrough: the evaluation measures.

The primary measure is the linear quantile score
``QS_alpha(q, y) = 2 (1{y < q} - alpha) (q - y)``. It is proper: guessing
one's true quantile minimizes the expected score, so there is no way to
game the leaderboard by hedging. Averaged over the five levels it
approximates the CRPS; coverage and interval length complete the picture.
"""

from datetime import date

import numpy as np

from quantile_hub import (
    DEFAULT_LEVELS,
    QuantileForecast,
    TEMPERATURE_TARGET,
    coverage_rate,
    crps_approx,
    interval_metrics,
    quantile_score,
    score_forecast,
    skill_score,
)

rng = np.random.default_rng(11)

print("== propriety, empirically ==")
draws = rng.standard_normal(200_000)
grid = np.arange(-3, 3.01, 0.05)
for alpha in (0.25, 0.5, 0.975):
    mean_scores = quantile_score(alpha, grid[:, None], draws[None, :]).mean(axis=1)
    best = grid[np.argmin(mean_scores)]
    print(f"  alpha={alpha}: empirical minimizer {best:+.2f} (true normal quantile "
          f"{np.quantile(draws, alpha):+.2f})")

print("\n== one forecast, one outcome ==")
fc = QuantileForecast(
    TEMPERATURE_TARGET, TEMPERATURE_TARGET.horizons[0], date(2021, 11, 3),
    (6.5, 8.0, 8.6, 9.2, 10.4),
)
y = 9.4
for alpha, q in zip(DEFAULT_LEVELS, fc.quantiles):
    print(f"  QS at level {alpha}: q={q} -> {quantile_score(alpha, q, y):.3f}")
print(f"  five-level average (CRPS approximation): {crps_approx(fc, y):.3f}")
m = interval_metrics(fc, y)
print(f"  50% interval covered: {m.covered_50}, 95%: {m.covered_95}, "
      f"lengths {m.len_50:.1f}/{m.len_95:.1f}, |median error| {m.abs_error:.1f}")

print("\n== a season of records -> coverage and skill ==")
records, bench_scores, own_scores = [], [], []
for week in range(13):
    truth = float(rng.normal(9.0, 2.0))
    quantiles = tuple(np.sort(truth + rng.normal(0.3, 1.2, size=5)))
    weekly_fc = QuantileForecast(
        TEMPERATURE_TARGET, TEMPERATURE_TARGET.horizons[0],
        date(2021, 11, 3), quantiles,
    )
    rec = score_forecast("demo", weekly_fc, truth)
    records.append(rec)
    own_scores.append(rec.mean_quantile_score)
    bench_scores.append(rec.mean_quantile_score * float(rng.uniform(0.8, 2.0)))

rate_50, rate_95 = coverage_rate(records)
print(f"  coverage over {len(records)} weeks: {rate_50:.1f}% / {rate_95:.1f}%")
skill = skill_score(float(np.mean(own_scores)), float(np.mean(bench_scores)))
print(f"  skill vs benchmark: {skill:+.3f} (positive = better than benchmark)")
