"""Operator command line.

All mutations of a challenge store flow through this tool::

    hub init --config season.txt --store ./store
    hub open-round 2021-11-03
    hub load-prices prices.csv
    hub load-observations temperature observations_temperature.csv
    hub load-nwp nwp/20211103T000000.txt ...
    hub ingest 2021-11-03 ./incoming
    hub score 2021-11-03
    hub leaderboard
    hub export --out ./public
    hub serve --port 8732
    hub validate 20211103_toad.csv
"""

from __future__ import annotations

import argparse
import sys
from datetime import date
from pathlib import Path

from ..core import InvalidRoundError, RoundSpec
from ..ingestion import DataFormatError
from ..submissions import parse_submission, parse_submission_filename
from .pipeline import ALLOWED_MISSES, Hub
from .state import Store, StoreError, parse_config_text


def _date_arg(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad date {value!r}, expected YYYY-MM-DD") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hub", description="Operate a weekly quantile-forecasting challenge."
    )
    parser.add_argument(
        "--store",
        default="hub_store",
        help="challenge store directory (default: ./hub_store)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a new store from a config file")
    p.add_argument("--config", required=True, help="key-value season config file")

    p = sub.add_parser("open-round", help="register a Wednesday round as open")
    p.add_argument("date", type=_date_arg)

    p = sub.add_parser("load-prices", help="load the index price CSV (date,close)")
    p.add_argument("file")

    p = sub.add_parser("load-observations", help="load a station observation CSV")
    p.add_argument("target", choices=["temperature", "wind"])
    p.add_argument("file")

    p = sub.add_parser("load-nwp", help="load NWP ensemble text files")
    p.add_argument("files", nargs="+")

    p = sub.add_parser("ingest", help="ingest a directory of submission files")
    p.add_argument("date", type=_date_arg)
    p.add_argument("directory")

    p = sub.add_parser("score", help="score a round and rebuild the leaderboard")
    p.add_argument("date", type=_date_arg)

    sub.add_parser("leaderboard", help="print the current leaderboard")

    p = sub.add_parser("export", help="write leaderboard, scores and analyses")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the read-only JSON API")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="127.0.0.1")

    p = sub.add_parser("validate", help="check one submission file (standalone)")
    p.add_argument("file")
    p.add_argument(
        "--repair-sort",
        action="store_true",
        help="organizer mode: re-sort non-monotone quantile rows instead of rejecting",
    )

    return parser


def cmd_init(args) -> int:
    cfg = parse_config_text(Path(args.config).read_text(encoding="utf-8"))
    Hub.initialize(args.store, cfg)
    print(f"initialized store at {args.store}")
    print(f"rounds: {', '.join(d.isoformat() for d in cfg.round_dates())}")
    return 0


def cmd_open_round(args) -> int:
    hub = Hub(Store(args.store))
    spec = hub.open_round(args.date)
    targets = ", ".join(t.kind.value for t in spec.targets)
    print(f"opened round {args.date} ({targets}; {spec.expected_row_count} rows expected)")
    return 0


def cmd_load_prices(args) -> int:
    hub = Hub(Store(args.store))
    n = hub.load_prices_file(args.file)
    print(f"loaded {n} price rows")
    return 0


def cmd_load_observations(args) -> int:
    hub = Hub(Store(args.store))
    n = hub.load_observations_file(args.target, args.file)
    print(f"loaded {n} {args.target} observations")
    return 0


def cmd_load_nwp(args) -> int:
    hub = Hub(Store(args.store))
    n = hub.load_nwp_files(args.files)
    print(f"loaded {n} ensemble records from {len(args.files)} file(s)")
    return 0


def cmd_ingest(args) -> int:
    hub = Hub(Store(args.store))
    summary = hub.ingest_directory(args.date, args.directory)
    for r in summary.results:
        status = "accepted" if r.accepted else "rejected"
        if r.deduplicated:
            status += " (duplicate)"
        print(f"{r.filename}: {status}")
        for msg in r.messages:
            print(f"    {msg}")
    print(
        f"round {summary.round_date}: "
        f"{len(summary.accepted_aliases)} accepted, {len(summary.rejected_aliases)} rejected"
    )
    return 0


def cmd_score(args) -> int:
    hub = Hub(Store(args.store))
    summary = hub.score_round(args.date)
    print(f"scored round {summary.round_date}: {summary.n_records} records")
    print(f"aliases: {', '.join(summary.aliases_scored)}")
    for note in summary.skipped_cells:
        print(f"    note ({note.target}, {note.horizon}): {note.reason}")
    return 0


def cmd_leaderboard(args) -> int:
    hub = Hub(Store(args.store))
    path = hub.store.leaderboard_json_path
    if not path.is_file():
        print("no leaderboard yet; score a round first", file=sys.stderr)
        return 1
    doc = hub.store.read_json(path)
    print(f"{'pos':>3}  {'alias':<20} {'avg rank':>8} {'best':>5} {'temp avg':>8}  tiebreak")
    for e in doc["entries"]:
        temp = e["temperature_average_rank"]
        print(
            f"{e['position']:>3}  {e['alias']:<20} {e['average_rank']:>8.3f} "
            f"{e['best_rank']:>5.1f} "
            f"{temp if temp is None else format(temp, '>8.3f')}  {e['tiebreak']}"
        )
        if e["exceeded_skip_allowance"]:
            print(
                f"     warning: {e['alias']} missed {e['missed_rounds']} rounds "
                f"(allowance is {ALLOWED_MISSES})"
            )
    if doc["references"]:
        refs = ", ".join(r["alias"] for r in doc["references"])
        print(f"reference forecasts (not ranked): {refs}")
    return 0


def cmd_export(args) -> int:
    hub = Hub(Store(args.store))
    written = hub.export(args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    print(f"serving read-only API on http://{args.host}:{args.port} (Ctrl-C to stop)")
    try:
        serve(args.store, args.port, args.host)
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_validate(args) -> int:
    path = Path(args.file)
    try:
        round_date, alias = parse_submission_filename(path.name)
    except ValueError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1

    store = Store(args.store)
    if store.exists():
        spec = Hub(store).round_spec(round_date)
    else:
        try:
            spec = RoundSpec(round_date)
        except InvalidRoundError as exc:
            print(f"invalid: {exc}", file=sys.stderr)
            return 1

    _, report = parse_submission(path.read_bytes(), spec, alias, repair_sort=args.repair_sort)
    print(report.summary())
    return 0 if report.verdict == "accepted" else 1


_COMMANDS = {
    "init": cmd_init,
    "open-round": cmd_open_round,
    "load-prices": cmd_load_prices,
    "load-observations": cmd_load_observations,
    "load-nwp": cmd_load_nwp,
    "ingest": cmd_ingest,
    "score": cmd_score,
    "leaderboard": cmd_leaderboard,
    "export": cmd_export,
    "serve": cmd_serve,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (StoreError, DataFormatError, InvalidRoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
