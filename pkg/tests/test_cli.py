import json

import pytest

from relaydde.cli import main

ROW1_FLAGS = ["--a1", "1", "--a2", "0.25", "--p1", "2.5", "--p2", "1.5"]


def _run(argv):
    return main(argv)


def test_solve_exact_summary(tmp_path):
    csv_path = tmp_path / "traj.csv"
    json_path = tmp_path / "summary.json"
    code = _run(
        ["solve", *ROW1_FLAGS, "--h", "0.25", "--horizon", "8",
         "--trajectory-csv", str(csv_path), "--summary-json", str(json_path)]
    )
    assert code == 0
    summary = json.loads(json_path.read_text())
    assert summary["zeros"] == pytest.approx([0.25, 2.25, 4.25, 6.25], abs=1e-12)
    assert summary["slowly_oscillating"] is True
    assert summary["x_at_T"] == pytest.approx(0.25, abs=1e-12)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,x"
    assert len(lines) == 802  # 0 .. 8 at the default 0.01 sampling


def test_solve_zero_history_rejected(tmp_path):
    code = _run(
        ["solve", *ROW1_FLAGS, "--h", "0", "--horizon", "8",
         "--trajectory-csv", str(tmp_path / "t.csv"), "--summary-json", str(tmp_path / "s.json")]
    )
    assert code == 2
    assert not (tmp_path / "t.csv").exists()


def test_solve_smoothed(tmp_path):
    json_path = tmp_path / "summary.json"
    code = _run(
        ["solve", *ROW1_FLAGS, "--h", "0.25", "--horizon", "4", "--delta", "0.05",
         "--step", "0.001", "--trajectory-csv", str(tmp_path / "t.csv"),
         "--summary-json", str(json_path)]
    )
    assert code == 0
    summary = json.loads(json_path.read_text())
    # one-period return from the exact fixed point shifts by 1.5*(a1-a2)*delta/4
    assert summary["x_at_T"] == pytest.approx(0.2359375, abs=1e-6)
    assert len(summary["zeros"]) == 2


def test_map_output(capsys):
    assert _run(["map", *ROW1_FLAGS]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["h_star"] == pytest.approx(0.25, abs=1e-15)
    assert out["m"] == -0.5
    assert out["overall"] is True
    assert out["valid_h_interval"]["upper"] == pytest.approx(0.5, abs=1e-15)


def test_map_fraction_fixed_point(capsys):
    assert _run(["map", "--a1", "2", "--a2", "0.25", "--p1", "2.5", "--p2", "1"]) == 0
    out = capsys.readouterr().out
    assert "0.571428571428571" in out


def test_map_degenerate_exit_code(capsys):
    assert _run(["map", "--a1", "1", "--a2", "1", "--p1", "2.5", "--p2", "1.5"]) == 1


def test_missing_parameter_exit_code():
    assert _run(["map", "--a1", "1", "--a2", "0.25", "--p1", "2.5"]) == 2


def test_unknown_command_exit_code():
    assert _run(["frobnicate"]) == 2


def test_verify_table_default(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert _run(["verify-table", "--report", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert len(report["rows"]) == 9
    assert report["all_passed"] is True


def test_verify_table_tampered_rows(tmp_path):
    rows = [
        {"a1": 1.0, "a2": 0.25, "p1": 2.5, "p2": 1.5, "h_star": 0.30, "T": 4.0},
        {"a1": 2.0, "a2": 0.5, "p1": 2.5, "p2": 2.0, "h_star": 1.0 / 3.0, "T": 4.5},
    ]
    rows_path = tmp_path / "rows.json"
    rows_path.write_text(json.dumps(rows))
    report_path = tmp_path / "report.json"
    assert _run(["verify-table", "--rows", str(rows_path), "--report", str(report_path)]) == 1
    report = json.loads(report_path.read_text())
    assert report["rows"][0]["passed"] is False
    assert report["rows"][1]["passed"] is True


def test_verify_table_missing_rows_file(tmp_path):
    assert _run(["verify-table", "--rows", str(tmp_path / "nope.json")]) == 2


def test_sweep_cli(tmp_path):
    csv_path = tmp_path / "cells.csv"
    json_path = tmp_path / "cells.json"
    code = _run(
        ["sweep", "--axis", "p1=1.0:2.0:5", "--a1", "1", "--a2", "0.25", "--p2", "1.5",
         "--csv", str(csv_path), "--json", str(json_path)]
    )
    assert code == 0
    report = json.loads(json_path.read_text())
    assert len(report["cells"]) == 5
    assert all(cell["overall"] is False for cell in report["cells"])


def test_sweep_malformed_axis_exit_code():
    assert _run(["sweep", "--axis", "p1=1:2", "--a1", "1", "--a2", "0.25", "--p2", "1.5"]) == 2
    assert _run(["sweep", "--axis", "zz=1:2:3", "--a1", "1", "--a2", "0.25", "--p2", "1.5"]) == 2


def test_sweep_jobs_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DDE_JOBS", "3")
    json_path = tmp_path / "cells.json"
    code = _run(
        ["sweep", "--axis", "p1=2.1:3.0:6", "--a1", "1", "--a2", "0.25", "--p2", "1.5",
         "--csv", str(tmp_path / "cells.csv"), "--json", str(json_path)]
    )
    assert code == 0
    assert len(json.loads(json_path.read_text())["cells"]) == 6


def test_smooth_cli(tmp_path):
    report_path = tmp_path / "conv.json"
    code = _run(["smooth", *ROW1_FLAGS, "--deltas", "0.05,0.025", "--report", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["delta"] == [0.05, 0.025]
    assert report["errors"] == [None, None]
    assert report["fitted_K"] == pytest.approx(0.5, abs=0.05)


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.toml"
    config.write_text(
        "[params]\na1 = 1.0\na2 = 0.5\np1 = 2.5\np2 = 1.5\n\n[smoothing]\ndelta = 0.0\n"
    )
    assert _run(["map", "--config", str(config)]) == 0
    base = json.loads(capsys.readouterr().out)
    assert base["m"] == 0.0  # a2 = 0.5 from the file
    assert _run(["map", "--config", str(config), "--a2", "0.25"]) == 0
    overridden = json.loads(capsys.readouterr().out)
    assert overridden["m"] == -0.5  # flag wins


def test_config_file_missing(tmp_path):
    assert _run(["map", "--config", str(tmp_path / "none.toml")]) == 2


def test_deterministic_outputs(tmp_path, capsys):
    args = ["map", *ROW1_FLAGS]
    assert _run(args) == 0
    first = capsys.readouterr().out
    assert _run(args) == 0
    assert capsys.readouterr().out == first

    paths = [tmp_path / "a.csv", tmp_path / "a.json", tmp_path / "b.csv", tmp_path / "b.json"]
    for csv_path, json_path in (paths[:2], paths[2:]):
        assert _run(
            ["solve", *ROW1_FLAGS, "--h", "0.3", "--horizon", "6",
             "--trajectory-csv", str(csv_path), "--summary-json", str(json_path)]
        ) == 0
    assert paths[0].read_bytes() == paths[2].read_bytes()
    assert paths[1].read_bytes() == paths[3].read_bytes()
