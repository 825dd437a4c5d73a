import json

import pytest

from symqa.cli import main
from symqa.io import read_csv

SMALL = {"problem": {"kind": "xxz", "couplings": [0.8, 0.5, 0.3]}, "annealing_time": 5.0,
         "drivers": ["transverse", "xy"], "noise": {"rate": 1e-3},
         "sweep": {"T_list": [2.0, 4.0], "amplitude_grid": [0.5, 1.0], "refine": False},
         "spectrum": {"grid_points": 11}}


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return path


def test_spectrum_preset_transverse(tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--preset", "spin-star-fig3", "--drivers", "transverse",
                 "--out", str(out)]) == 0
    header, rows = read_csv(out.read_text())
    assert len(rows) == 201
    assert len(header) == 1 + 16


def test_spectrum_sectors_and_multiple_drivers(config, tmp_path):
    out = tmp_path / "spec.csv"
    assert main(["spectrum", "--config", str(config), "--drivers", "xy", "--sectors",
                 "--out", str(out)]) == 0
    header, _ = read_csv(out.read_text())
    assert header[-1] == "sector_15"
    assert main(["spectrum", "--config", str(config), "--out", str(out)]) == 0
    assert (tmp_path / "spec_xy.csv").exists() and (tmp_path / "spec_transverse.csv").exists()


def test_sectors_flag_rejects_transverse(config, capsys):
    assert main(["spectrum", "--config", str(config), "--drivers", "transverse",
                 "--sectors"]) == 1
    assert "S_z" in capsys.readouterr().err


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"problem": {"kind": "xxz"}}))
    assert main(["anneal", "--config", str(bad)]) == 1
    assert "config invalid" in capsys.readouterr().err


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["anneal"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["anneal", "--preset", "xxz-fig4", "--drivers", "z"])
    assert info.value.code == 1


def test_unwritable_output(config, tmp_path, capsys):
    (tmp_path / "blocker").write_text("")
    assert main(["spectrum", "--config", str(config), "--drivers", "xy",
                 "--out", str(tmp_path / "blocker" / "x.csv")]) == 1


def test_anneal_records_are_deterministic(config, capsys):
    assert main(["anneal", "--config", str(config), "--seed", "4"]) == 0
    first = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert main(["anneal", "--config", str(config), "--seed", "4"]) == 0
    second = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert [r["config"]["drivers"] for r in first] == [["transverse"], ["xy"]]
    for a, b in zip(first, second):
        for r in (a, b):
            r.pop("timestamp"), r.pop("wall_time")
        assert a == b
        assert a["status"] == "ok" and a["config"]["seed"] == 4


def test_anneal_integrator_failure(tmp_path, capsys):
    doc = dict(SMALL, integrator={"method": "fixed-RK4", "max_step": 4.0})
    path = tmp_path / "unstable.json"
    path.write_text(json.dumps(doc))
    assert main(["anneal", "--config", str(path), "--drivers", "xy"]) == 2
    record = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert record["status"] == "failed"
    assert record["failure_time"] is not None


def test_sweep_outputs(config, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(config), "--out", str(out), "--threads", "1"]) == 0
    header, rows = read_csv(out.read_text())
    assert header == ["T", "driver", "amplitude_opt", "error", "fidelity"]
    assert len(rows) == 4
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    assert set(summary["drivers"]) == {"transverse", "xy"}
    assert "error_ratio_transverse_over_xy" in summary


def test_sweep_single_driver_single_T(tmp_path):
    doc = dict(SMALL, sweep={"T_list": [3.0], "optimize": False})
    path = tmp_path / "one.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "one.csv"
    assert main(["sweep", "--config", str(path), "--drivers", "xy", "--out", str(out)]) == 0
    _, rows = read_csv(out.read_text())
    assert [r[1] for r in rows] == ["xy"]


def test_optimize(config, tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["optimize", "--config", str(config), "--drivers", "xy", "--out", str(out)]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["best_amplitude"] in (0.5, 1.0)
    assert len(read_csv(out.read_text())[1]) == 2


def test_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") >= 12 and "FAIL" not in out


def test_verify_catches_sign_error():
    from symqa.hamiltonians import xy_ring
    from symqa.spin_ops import ManyBodyOperator
    from symqa.verify import run_checks

    def flipped(L, g):
        return ManyBodyOperator(L, -xy_ring(L, g).matrix)

    failed = {r.name for r in run_checks(xy_ring=flipped) if not r.passed}
    assert "Jordan-Wigner vs sector diagonalization (L<=8)" in failed
