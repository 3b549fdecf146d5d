import json

from click.testing import CliRunner

from tracekit.cli import main


def test_example_writes_geometry(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["example", "segment", "--out", str(tmp_path)])
    assert res.exit_code == 0
    payload = json.loads((tmp_path / "geometry.json").read_text())
    assert payload["name"] == "segment"
    assert len(payload["coords"]) == len(payload["mu"])


def test_example_cantor(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["example", "cantor", "--out", str(tmp_path),
                               "--theta", "1.5", "--depth", "4"])
    assert res.exit_code == 0
    payload = json.loads((tmp_path / "geometry.json").read_text())
    assert len(payload["gap_lengths"]) >= 4


def test_unknown_geometry_exit_3(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["example", "klein-bottle", "--out", str(tmp_path)])
    assert res.exit_code == 3


def test_verify_passes(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["verify", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert all(c["pass"] for c in report)


def test_verify_perturbed_exit_2(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["verify", "--out", str(tmp_path), "--perturb"])
    assert res.exit_code == 2
    assert "FAIL" in res.output


def test_extend_runs(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["extend", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "extend.json").read_text())
    assert payload["boundary_exact"] is True


def test_potentials_runs(tmp_path):
    runner = CliRunner()
    res = runner.invoke(main, ["potentials", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "potentials.json").read_text())
    assert payload["duality"]["gap"] <= 1e-9


def test_eval_deterministic(tmp_path):
    runner = CliRunner()
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        res = runner.invoke(main, ["eval", "--out", str(out), "--seed", "7",
                                   "--n-funcs", "3", "--geometry", "segment"])
        assert res.exit_code == 0, res.output
    assert (out1 / "eval.csv").read_bytes() == (out2 / "eval.csv").read_bytes()
