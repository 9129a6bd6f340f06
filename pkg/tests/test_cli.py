import json

from bssp.cli import main


def _read(path):
    return json.loads(path.read_text())


def test_solve_small(tmp_path):
    out = tmp_path / "run"
    code = main(["solve", "--n", "2", "--d", "1", "--trials", "25",
                 "--seed", "7", "--out", str(out)])
    assert code == 0
    report = _read(out / "report.json")
    assert report["success_rate"] >= 0.9
    assert (out / "solve.png").exists()
    assert (out / "manifest.json").exists()


def test_solve_resource_error(tmp_path):
    code = main(["solve", "--n", "9", "--d", "3", "--trials", "1",
                 "--out", str(tmp_path / "big")])
    assert code == 2


def test_replay_reproduces_bytes(tmp_path):
    first = tmp_path / "a"
    again = tmp_path / "b"
    assert main(["sweep", "--n", "1", "--d", "1", "--trials", "10",
                 "--seed", "3", "--out", str(first)]) == 0
    assert main(["replay", str(first / "manifest.json"),
                 "--out", str(again)]) == 0
    assert (first / "report.json").read_bytes() \
        == (again / "report.json").read_bytes()
    assert (first / "sweep.csv").read_bytes() \
        == (again / "sweep.csv").read_bytes()


def test_bfp_command(tmp_path):
    out = tmp_path / "bfp"
    code = main(["bfp", "--n", "1", "--d", "1", "--q", "2", "--trials",
                 "200", "--seed", "5", "--out", str(out)])
    assert code == 0
    report = _read(out / "report.json")
    assert report["bound"] == 1.0
    assert report["ratio"] <= 1.0 + 3 * report["sigma"] + 1e-9
    assert (out / "bfp.png").exists()


def test_o2h_command(tmp_path):
    out = tmp_path / "o2h"
    code = main(["o2h", "--n", "1", "--d", "1", "--trials", "100",
                 "--seed", "2", "--out", str(out)])
    assert code == 0
    assert _read(out / "report.json")["violations"] == 0


def test_sample_oracle_and_opacity(tmp_path):
    out = tmp_path / "oracle"
    assert main(["sample-oracle", "--n", "1", "--d", "1", "--seed", "4",
                 "--out", str(out)]) == 0
    assert (out / "oracle.json").exists()

    out2 = tmp_path / "opacity"
    assert main(["opacity", "--n", "2", "--d", "1", "--trials", "20",
                 "--seed", "4", "--out", str(out2)]) == 0
    assert (out2 / "opacity.csv").exists()
