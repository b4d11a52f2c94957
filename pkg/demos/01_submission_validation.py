#!/usr/bin/env python3
"""Walkthrough: the submission wire format and its strict validator.

A weekly submission is one CSV per participant with exactly one row per
(target, horizon) cell: five DAX horizons in calendar days, five
temperature and five wind horizons in hours. Each row carries the
2.5/25/50/75/97.5 percent predictive quantiles.
"""

from datetime import date

from quantile_hub import RoundSpec, parse_submission, serialize_submission

GOOD = """\
forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975
2021-11-03,DAX,1 day,-1.8,-0.3,0.1,0.6,1.7
2021-11-03,DAX,2 day,-3.0,-0.5,0.2,0.9,2.0
2021-11-03,DAX,5 day,-3.0,-0.7,0.2,1.2,2.4
2021-11-03,DAX,6 day,-3.6,-0.9,0.3,1.2,2.7
2021-11-03,DAX,7 day,-3.6,-0.9,0.5,1.4,3.2
2021-11-03,temperature,36 hour,6.5,8.0,8.6,9.2,10.4
2021-11-03,temperature,48 hour,6.2,7.9,8.7,9.2,10.6
2021-11-03,temperature,60 hour,7.9,9.8,10.9,11.7,13.4
2021-11-03,temperature,72 hour,4.3,6.8,7.6,8.3,9.7
2021-11-03,temperature,84 hour,8.5,10.4,11.3,12.0,14.2
2021-11-03,wind,36 hour,8.7,13.8,16.5,19.4,26.2
2021-11-03,wind,48 hour,5.8,15.5,18.9,23.1,30.8
2021-11-03,wind,60 hour,9.7,14.2,16.7,19.0,23.8
2021-11-03,wind,72 hour,6.9,11.9,14.2,17.1,24.3
2021-11-03,wind,84 hour,8.9,14.4,17.7,20.8,26.3
"""

round_spec = RoundSpec(date(2021, 11, 3))

print("== a correctly specified file ==")
sub, report = parse_submission(GOOD, round_spec, alias="toad")
print(f"verdict: {report.verdict}, rows: {len(sub.rows)}")
first = sub.rows[0]
print(f"first row: {first.target.kind.value} {first.horizon.label} -> {first.quantiles}")

print("\n== round-trip ==")
print("serialize(parse(file)) == file:", serialize_submission(sub) == GOOD)

print("\n== a file with crossed quantiles ==")
bad = GOOD.replace("-3.0,-0.5,0.2,0.9,2.0", "-3.0,0.9,0.2,-0.5,2.0")
sub_bad, report_bad = parse_submission(bad, round_spec, alias="toad")
print(report_bad.summary())
print("parsed object:", sub_bad)

print("\n== the same file in organizer repair mode ==")
sub_fixed, report_fixed = parse_submission(bad, round_spec, alias="toad", repair_sort=True)
print(f"verdict: {report_fixed.verdict}")
for w in report_fixed.warnings:
    print(f"  warning on line {w.line}: {w.message}")

print("\n== a file missing one cell ==")
lines = GOOD.strip().splitlines()
short = "\n".join(line for line in lines if "wind,84 hour" not in line)
_, report_short = parse_submission(short, round_spec, alias="toad")
print(report_short.summary())
