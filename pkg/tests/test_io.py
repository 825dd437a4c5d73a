import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from symqa.annealing import XXZProblem, ExperimentConfig, run
from symqa.errors import ArgumentError
from symqa.io import (PRESETS, ConfigError, ConfigFile, CurveWriter, SWEEP_HEADER, dumps_record,
                      experiment_document, fmt, load_config, loads_record, read_csv,
                      result_record, spectrum_csv, sweep_csv)
from symqa.spectra import SpectrumTrace

SMALL = {"problem": {"kind": "xxz", "couplings": [0.8, 0.5, 0.3]}, "annealing_time": 5.0,
         "drivers": ["xy", "transverse"], "seed": 3}


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    cfg = load_config(preset=name)
    assert cfg.name == name
    assert cfg.drivers == ("transverse", "xy")
    assert len(cfg.T_list()) == 20
    for driver in cfg.drivers:
        cfg.experiment(driver)


def test_l5_preset_uses_all_couplings():
    cfg = load_config(preset="xxz-fig4-L5")
    assert len(cfg.problem().couplings) == 4
    assert cfg.experiment("xy").sector_policy == 1


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="problem"):
        ConfigFile({"problem": {"kind": "xxz", "couplings": [1.0], "Delta": 1}})
    with pytest.raises(ConfigError, match="<root>"):
        ConfigFile({**SMALL, "extra": 1})


def test_bad_values_rejected():
    with pytest.raises(ConfigError):
        ConfigFile({**SMALL, "amplitude": -1})
    with pytest.raises(ConfigError):
        ConfigFile({**SMALL, "noise": {"rate": 0.1, "operator_kind": "plus"}})
    with pytest.raises(ConfigError):
        ConfigFile({"drivers": ["xy"]})


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config()
    with pytest.raises(ConfigError):
        load_config(preset="fig9")
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError, match="JSON"):
        load_config(bad)


def test_per_driver_amplitude_and_grids():
    cfg = ConfigFile({**SMALL, "amplitude": {"xy": 0.3},
                      "sweep": {"T_list": {"start": 1, "stop": 100, "num": 3},
                                "amplitude_grid": {"transverse": [1, 2]}}})
    assert cfg.experiment("xy").amplitude == 0.3
    assert cfg.experiment("transverse").amplitude == 1.0
    assert cfg.T_list() == pytest.approx([1, 10, 100])
    assert cfg.amplitude_grid("transverse") == [1.0, 2.0]
    assert cfg.amplitude_grid("xy") is None


def test_overrides():
    cfg = ConfigFile(SMALL).with_overrides(seed=9, drivers=("xy",))
    assert cfg.seed == 9 and cfg.drivers == ("xy",)
    assert SMALL["seed"] == 3


def test_config_echo_reproduces_run():
    exp = ConfigFile(SMALL).experiment("xy")
    echo = experiment_document(exp)
    again = ConfigFile(json.loads(json.dumps(echo))).experiment("xy")
    assert again == exp
    assert run(again).E_qa == run(exp).E_qa


def test_record_roundtrip_is_byte_identical():
    exp = ConfigFile(SMALL).experiment("xy")
    line = dumps_record(result_record(exp, run(exp), timestamp="t"))
    assert dumps_record(loads_record(line)) == line
    record = loads_record(line)
    for key in ("E_true", "E_qa", "estimation_error", "ground_fidelity", "wall_time",
                "sector_populations_initial", "library_version", "prng_algorithm"):
        assert key in record


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_roundtrips(x):
    assert float(fmt(x)) == x


def test_fmt_rejects_nan():
    with pytest.raises(ArgumentError):
        fmt(float("nan"))


def test_spectrum_csv_roundtrip():
    trace = SpectrumTrace(np.linspace(0, 1, 3), np.array([[0.1, 0.2], [1 / 3, 2.0], [-1.0, 5.0]]),
                          np.array([[0, 2], [0, 2], [2, 0]]))
    text = spectrum_csv(trace)
    header, rows = read_csv(text)
    assert header == ["s", "level_0", "level_1", "sector_0", "sector_1"]
    assert float(rows[1][1]) == 1 / 3
    rebuilt = SpectrumTrace(np.array([float(r[0]) for r in rows]),
                            np.array([[float(v) for v in r[1:3]] for r in rows]),
                            np.array([[int(v) for v in r[3:]] for r in rows]))
    assert spectrum_csv(rebuilt) == text


def test_sweep_csv_header():
    header, rows = read_csv(sweep_csv([]))
    assert header == SWEEP_HEADER and rows == []


def test_curve_writer(tmp_path):
    w = CurveWriter()
    w.write(tmp_path / "a" / "b.csv", "x\n")
    assert (tmp_path / "a" / "b.csv").read_text() == "x\n"
    (tmp_path / "file").write_text("")
    with pytest.raises(ConfigError):
        w.write(tmp_path / "file" / "c.csv", "x")
