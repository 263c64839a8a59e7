"""CLI subcommands, exit codes, and the analysis pipeline behind `analyze`."""

import json

import pytest

from scoreruns import cli, gamedata, runcore
from scoreruns.cli import AnalysisConfig, run_analysis
from scoreruns.gamedata import EventKind, GameLog, ScoringEvent, SequenceMode

HEADER = "game_id,date,home_team,away_team,period,clock_seconds_remaining,team,event_type,points"


def write_season(tmp_path, rows, name="season.csv"):
    path = tmp_path / name
    path.write_text("\n".join([HEADER] + rows) + "\n", encoding="utf-8")
    return str(path)


def labels_game(gid, labels, home="AAA", away="BBB", period=1):
    events = tuple(
        ScoringEvent(period, 700.0 - i, team, EventKind.FG2)
        for i, team in enumerate(labels)
    )
    return GameLog(gid, home, away, events)


# ---------------------------------------------------------------------------
# run_analysis


def test_run_analysis_single_game_observed_table(capsys):
    game = labels_game("G1", ["AAA", "AAA", "AAA"])
    report = run_analysis([game])
    assert report.p_same == 1.0
    observed = {k: o for k, o in zip(report.table.lengths, report.table.observed) if o}
    assert observed == {3: 1}
    # too little data for chi-square, but the report still comes back
    assert report.pooled is None
    assert "chi-square unavailable" in report.test_note


def test_run_analysis_per_half_keeps_units_separate():
    events = tuple(
        [ScoringEvent(2, 50.0 - i, "AAA", EventKind.FG2) for i in range(3)]
        + [ScoringEvent(3, 700.0 - i, "AAA", EventKind.FG2) for i in range(3)]
        + [ScoringEvent(3, 100.0, "BBB", EventKind.FG2)]
    )
    game = GameLog("G1", "AAA", "BBB", events)

    def observed(report):
        return {k: o for k, o in zip(report.table.lengths, report.table.observed) if o}

    full = run_analysis([game], AnalysisConfig())
    assert observed(full) == {6: 1}
    halves = run_analysis([game], AnalysisConfig(per_half=True))
    # the run does not survive the halftime split
    assert observed(halves) == {3: 2}
    assert halves.n_units == 2


def test_run_analysis_p_same_override_changes_expected_only():
    games = [labels_game("G1", ["AAA", "BBB", "AAA", "AAA"]),
             labels_game("G2", ["BBB", "BBB", "AAA", "BBB"])]
    base = run_analysis(games)
    forced = run_analysis(games, AnalysisConfig(p_same_override=0.38))
    assert forced.p_same == 0.38
    assert forced.table.observed == base.table.observed
    assert forced.table.expected != base.table.expected


def test_run_analysis_matched_only_requires_stats():
    games = [labels_game("G1", ["AAA", "BBB"])]
    with pytest.raises(gamedata.GameDataError, match="team season stats"):
        run_analysis(games, AnalysisConfig(matched_only=True))
    stats = {"AAA": 0.0, "BBB": 5.0}
    report = run_analysis(games, AnalysisConfig(matched_only=True), stats)
    assert report.n_games == 1


def test_run_analysis_home_road_means():
    games = [labels_game("G1", ["AAA", "AAA", "BBB"]),
             labels_game("G2", ["BBB", "AAA", "BBB"])]
    report = run_analysis(games)
    assert report.home_mean == pytest.approx(1.5)  # AAA runs: 2 then 1
    assert report.road_mean == pytest.approx(1.0)


def test_run_analysis_expected_column_mass():
    games = [labels_game(f"G{i}", ["AAA", "BBB"] * 20) for i in range(6)]
    report = run_analysis(games)
    assert sum(report.table.observed) == 6
    assert report.table.expected_total() == pytest.approx(6.0, abs=1e-9)


# ---------------------------------------------------------------------------
# subcommands end to end


def test_dist_text_and_reference_value(capsys):
    assert cli.main(["dist", "--total", "100", "--p-same", "0.38"]) == 0
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("expected longest run"))
    assert abs(float(line.split(":")[1]) - 5.38) <= 0.05


def test_dist_point_mass(capsys):
    assert cli.main(["dist", "--total", "1", "--p-same", "0.38"]) == 0
    out = capsys.readouterr().out
    assert "P(run = 1) = 1.000000" in out
    assert "expected longest run: 1.00" in out


def test_dist_at_least_matches_library(capsys):
    assert cli.main(["dist", "--total", "50", "--p-same", "0.38", "--at-least", "6",
                     "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    want = runcore.prob_longest_run_at_least(49, 0.38, 5)
    assert doc["at_least"]["probability"] == pytest.approx(want, abs=1e-15)


def test_dist_tsv_and_json_encode_identical_numbers(capsys):
    assert cli.main(["dist", "--total", "60", "--p-same", "0.38", "--format", "tsv"]) == 0
    tsv_out = capsys.readouterr().out
    assert cli.main(["dist", "--total", "60", "--p-same", "0.38", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rows = {}
    for line in tsv_out.splitlines()[1:]:
        k, v = line.split("\t")
        rows[k] = float(v)
    assert rows == {k: v for k, v in doc["pmf"].items()}


def test_dist_usage_errors():
    assert cli.main(["dist", "--total", "0", "--p-same", "0.38"]) == 1
    assert cli.main(["dist", "--total", "10", "--p-same", "1.4"]) == 1
    assert cli.main(["dist", "--total", "10", "--p-same", "0.38", "--at-least", "0"]) == 1
    assert cli.main(["dist", "--total", "10"]) == 1  # missing required flag
    assert cli.main([]) == 1  # missing subcommand


def test_analyze_single_game_csv(tmp_path, capsys):
    rows = [
        f"G1,2017-01-01,AAA,BBB,1,{700 - i},AAA,FG2,2" for i in range(3)
    ]
    path = write_season(tmp_path, rows)
    assert cli.main(["analyze", path, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    observed = {r["length"]: r["observed"] for r in doc["table"]["rows"] if r["observed"]}
    assert observed == {3: 1}
    assert doc["chi_square"] == []
    assert doc["chi_square_note"]


def test_analyze_missing_file_is_data_error(capsys):
    assert cli.main(["analyze", "/nonexistent/season.csv"]) == 2


def test_analyze_bad_schema_is_data_error(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("game_id,team\nG1,AAA\n", encoding="utf-8")
    assert cli.main(["analyze", str(path)]) == 2
    assert "missing columns" in capsys.readouterr().err


def test_analyze_matched_only_without_stats_is_usage_error(tmp_path, capsys):
    path = write_season(tmp_path, ["G1,2017-01-01,AAA,BBB,1,700,AAA,FG2,2"])
    assert cli.main(["analyze", path, "--matched-only"]) == 1


def test_analyze_matched_only_filters(tmp_path, capsys):
    rows = [
        "G1,2017-01-01,AAA,BBB,1,700,AAA,FG2,2",
        "G1,2017-01-01,AAA,BBB,1,650,BBB,FG2,2",
        "G2,2017-01-01,CCC,DDD,1,700,CCC,FG2,2",
        "G2,2017-01-01,CCC,DDD,1,650,DDD,FG2,2",
    ]
    season = write_season(tmp_path, rows)
    stats = tmp_path / "stats.csv"
    stats.write_text(
        "team,point_differential\nAAA,2.0\nBBB,4.0\nCCC,0.0\nDDD,0.0\n", encoding="utf-8"
    )
    assert cli.main(["analyze", season, "--matched-only", "--stats", str(stats),
                     "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n_games"] == 1  # G2 is not closely matched


def test_analyze_exclude_ot(tmp_path, capsys):
    rows = [
        "G1,2017-01-01,AAA,BBB,1,700,AAA,FG2,2",
        "G1,2017-01-01,AAA,BBB,4,10,BBB,FG2,2",
        "G1,2017-01-01,AAA,BBB,5,200,BBB,FG2,2",
        "G1,2017-01-01,AAA,BBB,5,100,BBB,FG2,2",
    ]
    path = write_season(tmp_path, rows)
    assert cli.main(["analyze", path, "--format", "json"]) == 0
    with_ot = json.loads(capsys.readouterr().out)
    assert cli.main(["analyze", path, "--exclude-ot", "--format", "json"]) == 0
    without = json.loads(capsys.readouterr().out)
    obs = lambda doc: {r["length"]: r["observed"] for r in doc["table"]["rows"] if r["observed"]}
    assert obs(with_ot) == {3: 1}
    assert obs(without) == {1: 1}


def test_simulate_analyze_round_trip(tmp_path, capsys):
    out = tmp_path / "season.csv"
    assert cli.main(["simulate", "--games", "40", "--range", "52:106",
                     "--p-same", "0.38", "--seed", "11", "--output", str(out)]) == 0
    summary = capsys.readouterr().out
    assert "wrote 40 games" in summary
    events_written = int(summary.split("(")[1].split()[0])
    season = gamedata.load_games(str(out))
    assert sum(len(g.events) for g in season) == events_written

    assert cli.main(["analyze", str(out), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n_games"] == 40
    assert sum(r["observed"] for r in doc["table"]["rows"]) == 40


def test_simulate_deterministic_files(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    flags = ["--games", "8", "--range", "52:60", "--seed", "4"]
    assert cli.main(["simulate", *flags, "--output", str(a)]) == 0
    assert cli.main(["simulate", *flags, "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    # JSON and CSV forms describe the same games
    c = tmp_path / "c.csv"
    assert cli.main(["simulate", *flags, "--output", str(c)]) == 0
    from_json = gamedata.load_games(str(a))
    from_csv = gamedata.load_games(str(c))
    assert [e.team for g in from_json for e in g.events] == [
        e.team for g in from_csv for e in g.events
    ]


def test_simulate_usage_errors(tmp_path):
    out = str(tmp_path / "x.csv")
    assert cli.main(["simulate", "--games", "0", "--output", out]) == 1
    assert cli.main(["simulate", "--games", "2", "--range", "52-106", "--output", out]) == 1
    assert cli.main(["simulate", "--games", "2", "--range", "1:10", "--output", out]) == 1
    assert cli.main(["simulate", "--games", "2", "--range", "9:5", "--output", out]) == 1
    assert cli.main(["simulate", "--games", "2", "--p-same", "7", "--output", out]) == 1


def test_simulate_unwritable_path_is_data_error(tmp_path):
    assert cli.main(["simulate", "--games", "1", "--output", "/nonexistent/dir/x.csv"]) == 2


def test_validate_passes(capsys):
    assert cli.main(["validate", "--max-n", "6"]) == 0
    out = capsys.readouterr().out
    assert "trials = total_scores - 1" in out
    assert "validate: PASS" in out


def test_validate_detects_corruption(monkeypatch, capsys):
    real = runcore.build_transition_matrix

    def corrupted(p, m):
        chain = real(p, m)
        entries = chain.entries.copy()
        entries[0, 0] += 0.01  # no longer a stochastic matrix
        object.__setattr__(chain, "entries", entries)
        return chain

    monkeypatch.setattr(runcore, "build_transition_matrix", corrupted)
    assert cli.main(["validate", "--max-n", "4"]) == 3
    assert "validate: FAIL" in capsys.readouterr().out


def test_validate_usage_bounds():
    assert cli.main(["validate", "--max-n", "0"]) == 1
    assert cli.main(["validate", "--max-n", "21"]) == 1
