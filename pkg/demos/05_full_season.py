#!/usr/bin/env python3
"""Walkthrough: a whole challenge season end to end.

Replays the bundled synthetic season (fixtures/season) into a temporary
store: open each Wednesday round, ingest the submission directory,
score once the outcomes are known, and print the final leaderboard plus
the weekly share of participants beating the benchmark.

The same flow is available on the command line::

    hub init --config fixtures/season/config.txt --store /tmp/store
    hub load-prices fixtures/season/prices.csv
    ...
    hub score 2021-11-03
    hub leaderboard
"""

import tempfile
from pathlib import Path

from quantile_hub.hub import Hub, parse_config_text

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "season"

cfg = parse_config_text((FIXTURE / "config.txt").read_text())
store_root = Path(tempfile.mkdtemp(prefix="quantile_hub_demo_")) / "store"
hub = Hub.initialize(store_root, cfg)

print(f"store: {store_root}")
print(f"season: {cfg.season_start} .. {cfg.season_end}, "
      f"{len(cfg.round_dates())} rounds, breaks {[str(d) for d in cfg.skip_dates]}")

n = hub.load_prices_file(FIXTURE / "prices.csv")
print(f"loaded {n} price rows")
for target in ("temperature", "wind"):
    n = hub.load_observations_file(target, FIXTURE / f"observations_{target}.csv")
    print(f"loaded {n} {target} observations")
n = hub.load_nwp_files(sorted((FIXTURE / "nwp").glob("*.txt")))
print(f"loaded {n} ensemble records")

for round_date in cfg.round_dates():
    hub.open_round(round_date)
    summary = hub.ingest_directory(round_date, FIXTURE / "submissions" / round_date.isoformat())
    line = f"{round_date}: {len(summary.accepted_aliases)} accepted"
    if summary.rejected_aliases:
        line += f", rejected {list(summary.rejected_aliases)}"
    print(line)

print("\nscoring every round ...")
for round_date in cfg.round_dates():
    result = hub.score_round(round_date)
    notes = "; ".join(f"({c.target} {c.horizon}) {c.reason}" for c in result.skipped_cells
                      if "emos" not in c.reason)
    print(f"{round_date}: {result.n_records} score records" + (f"  [{notes}]" if notes else ""))

doc = hub.build_leaderboard_doc()
print(f"\n== final leaderboard (seed {doc['seed']}) ==")
for e in doc["entries"]:
    flag = "  ! exceeded skip allowance" if e["exceeded_skip_allowance"] else ""
    print(f"  {e['position']}. {e['alias']:<10} avg rank {e['average_rank']:.2f} "
          f"(best {e['best_rank']:.0f}, missed {e['missed_rounds']}){flag}")
print("  reference forecasts:", ", ".join(r["alias"] for r in doc["references"]))

print("\n== share of participants beating the benchmark, per round ==")
rows = hub.share_beating_benchmark_table()
for target in ("DAX", "temperature", "wind"):
    shares = [r for r in rows if r["target"] == target]
    cells = " ".join("----" if r["share"] is None else f"{r['share']:.2f}" for r in shares)
    print(f"  {target:>12}: {cells}")

print(f"\nforecast/observation pairs evaluated: {hub.evaluation_pair_count()}")
print(f"artifacts live under {store_root} (leaderboard.json, rounds/<date>/scores.csv, ...)")
