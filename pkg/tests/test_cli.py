import json

import pytest

from nctorus import cli, config


@pytest.fixture(autouse=True)
def serial(monkeypatch):
    monkeypatch.setenv(config.THREADS_ENV, "1")


def run(capsys, *argv):
    code = cli.main([*argv, "--no-progress"])
    out, err = capsys.readouterr()
    return code, out, err


def test_residue_report(capsys, tmp_path):
    csv_path = tmp_path / "heat.csv"
    code, out, _ = run(capsys, "residue", "--csv", str(csv_path))
    assert code == cli.EXIT_OK
    assert "result: PASS" in out
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,heat_trace"
    assert len(lines) == 5


def test_residue_json_mirror(capsys):
    code, out, _ = run(capsys, "residue", "--json")
    data = json.loads(out)
    assert code == cli.EXIT_OK
    assert data["command"] == "residue" and data["passed"]
    assert data["summary"]["relative error"] <= 1e-2
    assert [row["t"] for row in data["rows"]] == [0.01, 0.005, 0.002, 0.001]


def test_gauge_check_is_deterministic(capsys):
    argv = ("gauge-check", "--theta12", "0.7071067811865476", "--n", "2", "--trials", "3", "--seed", "4")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == cli.EXIT_OK
    assert first[1] == second[1]


def test_projection_report(capsys):
    code, out, _ = run(capsys, "projection", "--trunc", "16", "--samples", "128", "--tol-chern", "1", "--tol-projection", "1")
    assert code == cli.EXIT_OK
    assert ["trace", "0.25"] in [line.split() for line in out.splitlines()]


def test_tolerance_failure_exit_code(capsys):
    code, out, _ = run(capsys, "projection", "--trunc", "8", "--samples", "64", "--tol-projection", "1e-12")
    assert code == cli.EXIT_FAIL
    assert "result: FAIL" in out


def test_convergence_errors_decrease_strictly(capsys):
    code, out, _ = run(capsys, "convergence", "--truncations", "16 32 64", "--json")
    rows = json.loads(out)["rows"]
    assert code == cli.EXIT_OK
    for column in ("l1(e^2 - e)", "chern2 error", "winding error"):
        values = [row[column] for row in rows]
        assert values == sorted(values, reverse=True) and len(set(values)) == 3


def test_convergence_fails_when_an_error_column_stalls(capsys, monkeypatch):
    def fake_row(pr):
        return [pr.trunc, 1.0 / pr.trunc, 0.0, 1e-3, 1.0 / pr.trunc]

    monkeypatch.setattr(cli, "worker_convergence_row", fake_row)
    code, out, _ = run(capsys, "convergence", "--truncations", "16 32")
    assert code == cli.EXIT_FAIL
    assert "result: FAIL" in out


def test_winding_report(capsys):
    code, out, _ = run(capsys, "winding", "--max-power", "1", "--bott", "--json")
    data = json.loads(out)
    assert code == cli.EXIT_OK
    assert data["rows"][0]["expected"] == -1
    assert data["rows"][0]["error"] <= 1e-3


def test_projection_passes_default_gates(capsys):
    code, out, _ = run(capsys, "projection", "--json")
    summary = json.loads(out)["summary"]
    assert code == cli.EXIT_OK
    assert summary["l1(e^2 - e)"] <= 1e-3
    assert abs(summary["chern2"][0] + 1) <= 1e-4


def test_export_import_round_trip(capsys, tmp_path):
    path = tmp_path / "e.nct"
    code, _, _ = run(capsys, "export", "projection", str(path), "--trunc", "16", "--samples", "128")
    assert code == cli.EXIT_OK

    code, out, _ = run(capsys, "import", str(path), "--json")
    summary = json.loads(out)["summary"]
    assert code == cli.EXIT_OK
    assert summary["trace"] == [0.25, 0.0]
    assert summary["hermitian"] is True


def test_potential_export_import(capsys, tmp_path):
    manifest = tmp_path / "pot.manifest"
    code, _, _ = run(capsys, "export", "potential", str(manifest), "--theta12", "0.3", "--k", "2")
    assert code == cli.EXIT_OK
    code, out, _ = run(capsys, "import", str(manifest), "--manifest", "--json")
    assert code == cli.EXIT_OK
    assert json.loads(out)["summary"]["k"] == 2.0


def test_corrupted_element_file(capsys, tmp_path):
    path = tmp_path / "bad.nct"
    path.write_text("nctorus v1 N=1 theta=0.0 0.0 0.0\n0 0 0 0 0 1.0\n")
    code, out, err = run(capsys, "import", str(path))
    assert code == cli.EXIT_ERROR
    assert "line 2" in err
    assert out == ""


def test_invalid_configuration(capsys):
    code, _, err = run(capsys, "projection", "--alpha", "0.7")
    assert code == cli.EXIT_ERROR
    assert "alpha" in err


def test_missing_config_file(capsys, tmp_path):
    code, _, _ = run(capsys, "residue", "--config", str(tmp_path / "nope.ini"))
    assert code == cli.EXIT_ERROR


def test_precondition_failure(capsys):
    code, _, err = run(capsys, "winding", "--trunc", "4", "--samples", "32", "--tol-projection", "1e-12")
    assert code == cli.EXIT_FAIL
    assert "precondition" in err
