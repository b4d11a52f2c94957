import json
import threading
import urllib.request
from datetime import date, datetime, timedelta, timezone
from http.server import ThreadingHTTPServer
from statistics import NormalDist

import pytest

from quantile_hub.hub import Hub, StoreError, parse_config_text
from quantile_hub.hub.cli import main as cli_main
from quantile_hub.hub.server import ApiError, HubApi, make_handler
from quantile_hub.hub.state import ChallengeConfig, ConfigError

UTC = timezone.utc

ROUND_1 = date(2021, 11, 3)
ROUND_2 = date(2021, 11, 10)

CONFIG_TEXT = """\
# two-round test season
station_id = 10384
season_start = 2021-11-03
weather_start = 2021-11-03
season_end = 2021-11-10
seed = 7
dax_window_days = 30
emos_min_train = 30
"""

Z = tuple(NormalDist().inv_cdf(a) for a in (0.025, 0.25, 0.5, 0.75, 0.975))

ALIASES = ("ann", "bob", "cat")


def weekdays(start, end):
    d = start
    while d <= end:
        if d.weekday() < 5:
            yield d
        d += timedelta(days=1)


def submission_text(round_date, shift=0.0):
    lines = ["forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975"]
    for target, horizons, center, width in (
        ("DAX", ["1 day", "2 day", "5 day", "6 day", "7 day"], 0.1 + shift, 1.5),
        ("temperature", ["36 hour", "48 hour", "60 hour", "72 hour", "84 hour"], 8.0 + shift, 2.0),
        ("wind", ["36 hour", "48 hour", "60 hour", "72 hour", "84 hour"], 15.0 + shift, 5.0),
    ):
        for h in horizons:
            cells = [f"{center + width * z:.4f}" for z in Z]
            lines.append(",".join([round_date.isoformat(), target, h, *cells]))
    return "\n".join(lines) + "\n"


def build_inputs(root):
    """Price, observation, ensemble and submission files for two rounds."""
    data = root / "inputs"
    data.mkdir()
    prices = ["date,close"]
    close = 15000.0
    for i, d in enumerate(weekdays(date(2021, 9, 1), date(2021, 11, 19))):
        close *= 1.0 + (0.001 if i % 2 else -0.0008)
        prices.append(f"{d},{close:.2f}")
    (data / "prices.csv").write_text("\n".join(prices) + "\n")

    for name, base in (("temperature", 8.0), ("wind", 14.0)):
        rows = ["timestamp_utc,value"]
        t = datetime(2021, 11, 3, 0, tzinfo=UTC)
        i = 0
        while t <= datetime(2021, 11, 14, 12, tzinfo=UTC):
            rows.append(f"{t.strftime('%Y-%m-%dT%H:%M:%SZ')},{base + (i % 5) * 0.7:.2f}")
            t += timedelta(hours=12)
            i += 1
        (data / f"observations_{name}.csv").write_text("\n".join(rows) + "\n")

    for round_date in (ROUND_1, ROUND_2):
        lines = [f"init_time={round_date.isoformat()}T00:00:00Z"]
        for variable, level in (("temperature_2m", 9.0), ("wind_10m", 16.0)):
            for lead in (36, 48, 60, 72, 84):
                lines.append(f"variable={variable} lead={lead}")
                members = [f"{level + 0.05 * m + lead / 100:.3f}" for m in range(40)]
                lines.append(",".join(members))
        (data / f"nwp_{round_date:%Y%m%d}.txt").write_text("\n".join(lines) + "\n")

    for round_date in (ROUND_1, ROUND_2):
        sub_dir = data / f"submissions_{round_date:%Y%m%d}"
        sub_dir.mkdir()
        for i, alias in enumerate(ALIASES):
            text = submission_text(round_date, shift=0.3 * i)
            if alias == "bob" and round_date == ROUND_1:
                # break monotonicity in the first data row
                rows = text.splitlines()
                cells = rows[1].split(",")
                cells[3], cells[5] = cells[5], cells[3]
                rows[1] = ",".join(cells)
                text = "\n".join(rows) + "\n"
            (sub_dir / f"{round_date:%Y%m%d}_{alias}.csv").write_text(text)
        (sub_dir / "notes.txt").write_text("not a submission\n")
    return data


@pytest.fixture(scope="module")
def seeded_store(tmp_path_factory):
    root = tmp_path_factory.mktemp("hubtest")
    data = build_inputs(root)
    (root / "config.txt").write_text(CONFIG_TEXT)
    cfg = parse_config_text(CONFIG_TEXT)
    hub = Hub.initialize(root / "store", cfg)
    hub.load_prices_file(data / "prices.csv")
    hub.load_observations_file("temperature", data / "observations_temperature.csv")
    hub.load_observations_file("wind", data / "observations_wind.csv")
    hub.load_nwp_files(sorted(data.glob("nwp_*.txt")))
    return hub, data


class TestConfig:
    def test_parse(self):
        cfg = parse_config_text(CONFIG_TEXT)
        assert cfg.station_id == "10384"
        assert cfg.round_dates() == [ROUND_1, ROUND_2]
        assert cfg.seed == 7

    def test_skip_dates_excluded(self):
        cfg = ChallengeConfig(
            station_id="x",
            season_start=date(2021, 11, 3),
            season_end=date(2021, 11, 17),
            skip_dates=(date(2021, 11, 10),),
        )
        assert cfg.round_dates() == [date(2021, 11, 3), date(2021, 11, 17)]

    def test_non_wednesday_season_start_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text(CONFIG_TEXT.replace("2021-11-03", "2021-11-04"))

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text(CONFIG_TEXT + "favourite_colour = green\n")

    def test_dax_only_before_weather_start(self):
        cfg = parse_config_text(
            CONFIG_TEXT.replace("weather_start = 2021-11-03", "weather_start = 2021-11-10")
        )
        assert [t.kind.value for t in cfg.targets_for(ROUND_1)] == ["DAX"]
        assert len(cfg.targets_for(ROUND_2)) == 3


class TestLifecycle:
    def test_01_open_rounds(self, seeded_store):
        hub, _ = seeded_store
        spec = hub.open_round(ROUND_1)
        assert spec.expected_row_count == 15
        hub.open_round(ROUND_2)
        assert hub.store.round_states() == {ROUND_1: "open", ROUND_2: "open"}

    def test_02_duplicate_open_rejected(self, seeded_store):
        hub, _ = seeded_store
        with pytest.raises(StoreError, match="already"):
            hub.open_round(ROUND_1)

    def test_03_non_round_date_rejected(self, seeded_store):
        hub, _ = seeded_store
        with pytest.raises(StoreError):
            hub.open_round(date(2021, 11, 17))  # Wednesday, but outside the season

    def test_04_ingest(self, seeded_store):
        hub, data = seeded_store
        summary = hub.ingest_directory(ROUND_1, data / "submissions_20211103")
        assert summary.accepted_aliases == ("ann", "cat")
        assert summary.rejected_aliases == ("bob",)
        skipped = [r for r in summary.results if r.alias is None]
        assert len(skipped) == 1 and "notes.txt" == skipped[0].filename

    def test_05_reingest_is_idempotent(self, seeded_store):
        hub, data = seeded_store
        before = sorted(p.name for p in hub.store.submissions_dir(ROUND_1).iterdir())
        summary = hub.ingest_directory(ROUND_1, data / "submissions_20211103")
        assert all(r.deduplicated for r in summary.results if r.alias in ("ann", "cat"))
        after = sorted(p.name for p in hub.store.submissions_dir(ROUND_1).iterdir())
        assert before == after

    def test_06_correction_creates_new_version(self, seeded_store):
        hub, data = seeded_store
        fixed = data / "bob_fix"
        fixed.mkdir()
        (fixed / f"{ROUND_1:%Y%m%d}_bob.csv").write_text(submission_text(ROUND_1, shift=0.4))
        summary = hub.ingest_directory(ROUND_1, fixed)
        assert summary.accepted_aliases == ("bob",)
        manifest = hub._read_manifest(ROUND_1)
        assert len(manifest["ingests"]) == 4  # 3 originals + correction
        assert "bob" in manifest["effective"]
        # original rejected attempt is still on record
        assert any(not e["accepted"] for e in manifest["ingests"] if e["alias"] == "bob")

    def test_07_score_round(self, seeded_store):
        hub, data = seeded_store
        hub.ingest_directory(ROUND_2, data / "submissions_20211110")
        summary = hub.score_round(ROUND_1)
        # 3 participants + benchmark + 2 ensembles, 15 cells each; EMOS skipped
        assert summary.n_records == 6 * 15
        assert "emos" not in summary.aliases_scored
        assert any("emos skipped" in n.reason for n in summary.skipped_cells)
        assert hub.store.round_states()[ROUND_1] == "scored"
        derived = hub.store.derived_dir(ROUND_1)
        assert (derived / f"{ROUND_1:%Y%m%d}_benchmark.csv").is_file()
        assert (derived / f"{ROUND_1:%Y%m%d}_ensemble_mean.csv").is_file()
        assert (derived / f"{ROUND_1:%Y%m%d}_ensemble_median.csv").is_file()
        assert hub.store.leaderboard_json_path.is_file()

    def test_08_scoring_is_idempotent(self, seeded_store):
        hub, _ = seeded_store
        scores_before = hub.store.scores_path(ROUND_1).read_bytes()
        board_before = hub.store.leaderboard_json_path.read_bytes()
        hub.score_round(ROUND_1)
        assert hub.store.scores_path(ROUND_1).read_bytes() == scores_before
        assert hub.store.leaderboard_json_path.read_bytes() == board_before

    def test_09_ingest_after_scored_rejected(self, seeded_store):
        hub, data = seeded_store
        with pytest.raises(StoreError, match="scored"):
            hub.ingest_directory(ROUND_1, data / "submissions_20211103")

    def test_10_score_second_round_and_misses(self, seeded_store):
        hub, _ = seeded_store
        hub.score_round(ROUND_2)
        doc = hub.store.read_json(hub.store.leaderboard_json_path)
        assert [e["alias"] for e in doc["entries"]] != []
        assert doc["rounds_included"] == [ROUND_1.isoformat(), ROUND_2.isoformat()]
        misses = hub.missed_rounds()
        assert misses == {"ann": 0, "bob": 0, "cat": 0}
        positions = [e["position"] for e in doc["entries"]]
        assert positions == sorted(positions)
        ref_aliases = {r["alias"] for r in doc["references"]}
        assert ref_aliases == {"benchmark", "ensemble_mean", "ensemble_median"}

    def test_11_export(self, seeded_store, tmp_path):
        hub, _ = seeded_store
        written = hub.export(tmp_path / "public")
        names = {p.name for p in written}
        assert names == {
            "leaderboard.json",
            "leaderboard.csv",
            "scores.csv",
            "aggregates.csv",
            "coverage.json",
            "share_beating_benchmark.json",
        }
        aggregates = (tmp_path / "public" / "aggregates.csv").read_text()
        assert aggregates.splitlines()[0] == "participant,target,horizon,n_rounds,mean_score,skill"
        board = json.loads((tmp_path / "public" / "leaderboard.json").read_text())
        assert board == hub.store.read_json(hub.store.leaderboard_json_path)

    def test_12_writer_lock_blocks_second_writer(self, seeded_store):
        hub, data = seeded_store
        with hub.store.writer_lock():
            with pytest.raises(StoreError, match="locked"):
                hub.load_prices_file(data / "prices.csv")

    def test_13_no_temp_files_left(self, seeded_store):
        hub, _ = seeded_store
        leftovers = list(hub.store.root.rglob("*.tmp"))
        assert leftovers == []


class TestApi:
    @pytest.fixture()
    def api(self, seeded_store):
        hub, _ = seeded_store
        return HubApi(hub)

    def test_rounds(self, api):
        rounds = api.handle("/api/rounds", {})
        assert [r["round"] for r in rounds] == ["2021-11-03", "2021-11-10"]
        assert rounds[0]["state"] == "scored"
        assert rounds[0]["accepted_aliases"] == ["ann", "bob", "cat"]

    def test_leaderboard_matches_file(self, api, seeded_store):
        hub, _ = seeded_store
        doc = api.handle("/api/leaderboard", {})
        assert doc == hub.store.read_json(hub.store.leaderboard_json_path)

    def test_forecasts(self, api):
        doc = api.handle("/api/forecasts", {"target": ["wind"], "round": ["2021-11-03"]})
        assert set(doc["forecasts"]) == {
            "ann",
            "bob",
            "cat",
            "benchmark",
            "ensemble_mean",
            "ensemble_median",
        }
        assert doc["reserved_aliases"] == ["benchmark", "ensemble_mean", "ensemble_median"]
        ann = doc["forecasts"]["ann"]
        assert [row["horizon"] for row in ann] == ["36 hour", "48 hour", "60 hour", "72 hour", "84 hour"]
        assert ann[0]["valid_time"] == "2021-11-04T12:00:00Z"
        assert len(doc["observations"]) == 5
        assert all(o["value"] is not None for o in doc["observations"])

    def test_observations(self, api):
        doc = api.handle("/api/observations", {"target": ["temperature"]})
        assert doc["target"] == "temperature"
        assert len(doc["series"]) > 20

    def test_scores(self, api):
        rows = api.handle("/api/scores", {"target": ["DAX"], "horizon": ["1 day"]})
        aliases = {r["alias"] for r in rows}
        assert {"ann", "bob", "cat", "benchmark"} <= aliases
        bench = next(r for r in rows if r["alias"] == "benchmark")
        assert bench["skill"] == 0.0
        assert bench["is_reference"] is True

    def test_analyses(self, api):
        coverage = api.handle("/api/analysis/coverage", {})
        assert any(row["alias"] == "ensemble_mean" for row in coverage)
        share = api.handle("/api/analysis/share-beating-benchmark", {})
        assert {row["target"] for row in share} == {"DAX", "temperature", "wind"}
        assert all(0.0 <= row["share"] <= 1.0 for row in share if row["share"] is not None)

    @pytest.mark.parametrize(
        "path,params,status",
        [
            ("/api/unknown", {}, 404),
            ("/api/forecasts", {"target": ["wind"]}, 400),
            ("/api/forecasts", {"target": ["gold"], "round": ["2021-11-03"]}, 400),
            ("/api/forecasts", {"target": ["wind"], "round": ["2021-12-01"]}, 404),
            ("/api/scores", {}, 400),
        ],
    )
    def test_error_paths(self, api, path, params, status):
        with pytest.raises(ApiError) as exc:
            api.handle(path, params)
        assert exc.value.status == status

    def test_serve_refuses_missing_store(self, tmp_path):
        from quantile_hub.hub.server import serve

        with pytest.raises(StoreError, match="init"):
            serve(str(tmp_path / "nowhere"), port=0)

    def test_serve_refuses_corrupt_store(self, tmp_path):
        from quantile_hub.hub.server import serve

        root = tmp_path / "broken"
        root.mkdir()
        (root / "config.json").write_text("{not json")
        with pytest.raises(StoreError, match="corrupt"):
            serve(str(root), port=0)

    def test_http_round_trip(self, seeded_store):
        hub, _ = seeded_store
        httpd = ThreadingHTTPServer(("127.0.0.1", 0), make_handler(HubApi(hub)))
        thread = threading.Thread(target=httpd.serve_forever, daemon=True)
        thread.start()
        try:
            port = httpd.server_address[1]
            with urllib.request.urlopen(f"http://127.0.0.1:{port}/api/rounds") as resp:
                assert resp.status == 200
                assert resp.headers["Access-Control-Allow-Origin"] == "*"
                body = json.loads(resp.read())
            assert [r["round"] for r in body] == ["2021-11-03", "2021-11-10"]
            with urllib.request.urlopen(
                f"http://127.0.0.1:{port}/api/forecasts?target=wind&round=2021-11-03"
            ) as resp:
                assert resp.status == 200
        finally:
            httpd.shutdown()
            httpd.server_close()


class TestCli:
    def test_validate_accepts_good_file(self, tmp_path, capsys):
        good = tmp_path / "20211103_zelda.csv"
        good.write_text(submission_text(ROUND_1))
        assert cli_main(["validate", str(good)]) == 0
        assert "accepted" in capsys.readouterr().out

    def test_validate_rejects_bad_file(self, tmp_path, capsys):
        bad = tmp_path / "20211103_zelda.csv"
        text = submission_text(ROUND_1).splitlines()
        text[1] = text[1].replace("DAX", "GOLD")
        bad.write_text("\n".join(text) + "\n")
        assert cli_main(["validate", str(bad)]) == 1
        out = capsys.readouterr().out
        assert "rejected" in out
        assert "unknown_target" in out

    def test_validate_repair_sort(self, tmp_path, capsys):
        rows = submission_text(ROUND_1).splitlines()
        cells = rows[1].split(",")
        cells[3], cells[5] = cells[5], cells[3]
        rows[1] = ",".join(cells)
        bad = tmp_path / "20211103_zelda.csv"
        bad.write_text("\n".join(rows) + "\n")
        assert cli_main(["validate", str(bad)]) == 1
        assert cli_main(["validate", "--repair-sort", str(bad)]) == 0

    def test_cli_error_reporting(self, tmp_path, capsys):
        rc = cli_main(["--store", str(tmp_path / "nostore"), "score", "2021-11-03"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_full_cli_cycle(self, tmp_path, capsys):
        data = build_inputs(tmp_path)
        (tmp_path / "config.txt").write_text(CONFIG_TEXT)
        store = str(tmp_path / "store")
        steps = [
            ["init", "--config", str(tmp_path / "config.txt")],
            ["open-round", "2021-11-03"],
            ["load-prices", str(data / "prices.csv")],
            ["load-observations", "temperature", str(data / "observations_temperature.csv")],
            ["load-observations", "wind", str(data / "observations_wind.csv")],
            ["load-nwp", *map(str, sorted(data.glob("nwp_*.txt")))],
            ["ingest", "2021-11-03", str(data / "submissions_20211103")],
            ["score", "2021-11-03"],
            ["leaderboard"],
            ["export", "--out", str(tmp_path / "public")],
        ]
        for step in steps:
            rc = cli_main(["--store", store, *step])
            assert rc == 0, f"step {step} failed: {capsys.readouterr()}"
        out = capsys.readouterr().out
        assert "benchmark" in out
        assert (tmp_path / "public" / "leaderboard.csv").is_file()
