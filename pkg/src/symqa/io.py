"""Configuration files, presets and result serialization.

Configs are JSON documents validated against ``CONFIG_SCHEMA`` before any
computation; unknown keys are rejected.  Run records are JSON lines, curves
and spectra are CSV with 17 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .annealing import (DRIVERS, PRNG_ALGORITHM, ExperimentConfig, RandomXXZProblem,
                        SpinStarProblem, XXZProblem)
from .errors import ArgumentError
from .evolution import IntegratorParams, NoiseSpec
from .hamiltonians import table1_couplings

PRESETS = ("spin-star-fig3", "xxz-fig4", "xxz-fig4-L5")


class ConfigError(ArgumentError):
    """A config file is unreadable or fails schema validation."""


_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}
_grid = {
    "oneOf": [
        {"type": "array", "items": _positive, "minItems": 1},
        {"type": "object", "additionalProperties": False,
         "required": ["start", "stop", "num"],
         "properties": {"start": _positive, "stop": _positive,
                        "num": {"type": "integer", "minimum": 1},
                        "spacing": {"enum": ["log", "linear"]}}},
    ]
}


def _per_driver(schema):
    return {"oneOf": [schema, {"type": "object", "additionalProperties": False,
                               "minProperties": 1,
                               "properties": {d: schema for d in DRIVERS}}]}


CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["problem"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "problem": {"oneOf": [
            {"type": "object", "additionalProperties": False, "required": ["kind"],
             "properties": {"kind": {"const": "spin-star"},
                            "outer_sites": {"type": "integer", "minimum": 1},
                            "omega": _number, "omega1": _number, "coupling": _number,
                            "phase": {"enum": ["complex", "real"]}}},
            {"type": "object", "additionalProperties": False,
             "required": ["kind", "couplings"],
             "properties": {"kind": {"const": "xxz"},
                            "couplings": {"oneOf": [
                                {"type": "array", "items": _number, "minItems": 1},
                                {"type": "object", "additionalProperties": False,
                                 "required": ["fixture"],
                                 "properties": {"fixture": {"const": "table1"},
                                                "count": {"type": "integer",
                                                          "minimum": 1, "maximum": 4}}}]},
                            "delta": _number}},
            {"type": "object", "additionalProperties": False,
             "required": ["kind", "sites"],
             "properties": {"kind": {"const": "random-xxz"},
                            "sites": {"type": "integer", "minimum": 2},
                            "delta": _number, "low": _number, "high": _number}},
        ]},
        "drivers": {"type": "array", "items": {"enum": list(DRIVERS)},
                    "minItems": 1, "uniqueItems": True},
        "amplitude": _per_driver(_positive),
        "annealing_time": _positive,
        "noise": {"type": "object", "additionalProperties": False,
                  "properties": {"rate": {"type": "number", "minimum": 0},
                                 "operator_kind": {"enum": ["x", "y", "z"]}}},
        "sector_policy": {"oneOf": [{"enum": ["auto", "global", "sweep-sectors"]},
                                    {"type": "integer"}]},
        "integrator": {"type": "object", "additionalProperties": False,
                       "properties": {"method": {"enum": ["adaptive-RK", "fixed-RK4"]},
                                      "rel_tol": _positive, "abs_tol": _positive,
                                      "max_step": {"oneOf": [_positive, {"type": "null"}]},
                                      "sample_count": {"type": "integer", "minimum": 2}}},
        "seed": {"type": "integer", "minimum": 0},
        "sweep": {"type": "object", "additionalProperties": False,
                  "properties": {"T_list": _grid,
                                 "amplitude_grid": _per_driver(_grid),
                                 "optimize": {"type": "boolean"},
                                 "refine": {"type": "boolean"}}},
        "spectrum": {"type": "object", "additionalProperties": False,
                     "properties": {"grid_points": {"type": "integer", "minimum": 2},
                                    "level_count": {"oneOf": [{"type": "integer",
                                                               "minimum": 1},
                                                              {"type": "null"}]}}},
    },
}


def _expand_grid(spec):
    if isinstance(spec, list):
        return [float(x) for x in spec]
    num = spec["num"]
    if spec.get("spacing", "log") == "log":
        return [float(x) for x in np.geomspace(spec["start"], spec["stop"], num)]
    return [float(x) for x in np.linspace(spec["start"], spec["stop"], num)]


def _for_driver(value, driver, default=None):
    if isinstance(value, dict) and set(value) <= set(DRIVERS):
        return value.get(driver, default)
    return default if value is None else value


@dataclass(frozen=True)
class ConfigFile:
    """A validated config document and the objects it describes."""

    document: dict
    name: str = ""

    def __post_init__(self):
        try:
            jsonschema.validate(self.document, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config invalid at {path}: {exc.message}") from None

    @property
    def drivers(self):
        return tuple(self.document.get("drivers", DRIVERS))

    @property
    def seed(self):
        return int(self.document.get("seed", 0))

    def problem(self):
        p = dict(self.document["problem"])
        kind = p.pop("kind")
        if kind == "spin-star":
            return SpinStarProblem(**p)
        if kind == "xxz":
            couplings = p.pop("couplings")
            if isinstance(couplings, dict):
                couplings = table1_couplings()[:couplings.get("count", 4)]
            return XXZProblem(tuple(couplings), **p)
        return RandomXXZProblem(**p)

    def experiment(self, driver):
        d = self.document
        amplitude = _for_driver(d.get("amplitude"), driver, 1.0)
        return ExperimentConfig(
            problem=self.problem(),
            driver_kind=driver,
            amplitude=float(amplitude),
            annealing_time=float(d.get("annealing_time", 100.0)),
            noise=NoiseSpec(**d.get("noise", {})),
            sector_policy=d.get("sector_policy", "auto"),
            integrator=IntegratorParams(**d.get("integrator", {})),
            seed=self.seed,
        )

    def T_list(self):
        spec = self.document.get("sweep", {}).get("T_list")
        if spec is None:
            return [float(self.document.get("annealing_time", 100.0))]
        return sorted(_expand_grid(spec))

    def amplitude_grid(self, driver):
        spec = self.document.get("sweep", {}).get("amplitude_grid")
        spec = _for_driver(spec, driver) if spec is not None else None
        return None if spec is None else _expand_grid(spec)

    def sweep_option(self, key, default):
        return self.document.get("sweep", {}).get(key, default)

    def spectrum_option(self, key, default):
        return self.document.get("spectrum", {}).get(key, default)

    def with_overrides(self, seed=None, drivers=None):
        doc = json.loads(json.dumps(self.document))
        if seed is not None:
            doc["seed"] = int(seed)
        if drivers is not None:
            doc["drivers"] = list(drivers)
        return ConfigFile(doc, self.name)


def load_config(path=None, preset=None):
    """Load a config file, a named preset, or a preset-relative file."""
    if (path is None) == (preset is None):
        raise ConfigError("give exactly one of a config path or a preset name")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        text = resources.files("symqa.presets").joinpath(f"{preset}.json").read_text()
        name = preset
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        name = Path(path).stem
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return ConfigFile(document, name)


def experiment_document(config):
    """Config-file document that reproduces a single :class:`ExperimentConfig`."""
    problem = {k: v for k, v in asdict(config.problem).items()}
    if problem["kind"] == "xxz":
        problem["couplings"] = list(problem["couplings"])
    return {
        "problem": problem,
        "drivers": [config.driver_kind],
        "amplitude": config.amplitude,
        "annealing_time": config.annealing_time,
        "noise": asdict(config.noise),
        "sector_policy": config.sector_policy,
        "integrator": asdict(config.integrator),
        "seed": config.seed,
    }


def _jsonable(value):
    if isinstance(value, dict):
        return {("null" if k is None else str(k)): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def result_record(config, result, timestamp=None):
    """Flatten a run into a JSON-serializable record with provenance fields."""
    record = _jsonable(asdict(result))
    record.update({
        "record_type": "run",
        "status": "ok",
        "config": experiment_document(config),
        "library_version": __version__,
        "prng_algorithm": PRNG_ALGORITHM,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
    })
    return record


def failure_record(config, error, timestamp=None):
    return {
        "record_type": "run",
        "status": "failed",
        "error": str(error),
        "failure_time": getattr(error, "time", None),
        "config": experiment_document(config),
        "library_version": __version__,
        "prng_algorithm": PRNG_ALGORITHM,
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
    }


def dumps_record(record):
    """One JSON line; keys sorted so re-serialization is byte-identical."""
    return json.dumps(record, sort_keys=True, allow_nan=False)


def loads_record(line):
    return json.loads(line)


def fmt(x):
    """17 significant digits, the round-trip precision of a double."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ArgumentError(f"cannot serialize non-finite value {x}")
    return format(x, ".17g")


def spectrum_csv(trace):
    """CSV text for a spectrum trace: ``s, level_0..level_k-1[, sector_0..]``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    k = trace.level_count
    header = ["s"] + [f"level_{i}" for i in range(k)]
    if trace.sector_labels is not None:
        header += [f"sector_{i}" for i in range(k)]
    writer.writerow(header)
    for i, s in enumerate(trace.s_grid):
        row = [fmt(s)] + [fmt(e) for e in trace.levels[i]]
        if trace.sector_labels is not None:
            row += [fmt(int(m)) for m in trace.sector_labels[i]]
        writer.writerow(row)
    return buf.getvalue()


SWEEP_HEADER = ["T", "driver", "amplitude_opt", "error", "fidelity"]


def sweep_csv(sweeps):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for sweep in sweeps:
        for p in sweep.points:
            writer.writerow([fmt(p.annealing_time), sweep.driver_kind, fmt(p.amplitude),
                             fmt(p.result.estimation_error), fmt(p.result.ground_fidelity)])
    return buf.getvalue()


def read_csv(text):
    """Parse CSV text back into a header and rows of strings."""
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def sweep_summary(sweeps, config_name=""):
    drivers = {s.driver_kind: _jsonable(s.summary()) for s in sweeps}
    summary = {"config": config_name, "drivers": drivers,
               "library_version": __version__}
    if {"xy", "transverse"} <= set(drivers):
        summary["error_ratio_transverse_over_xy"] = (
            drivers["transverse"]["min_error"] / drivers["xy"]["min_error"])
    return summary


@dataclass
class CurveWriter:
    """Serialized writer for output files; creates parent directories."""

    written: list = field(default_factory=list)

    def write(self, path, text):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {path}: {exc.strerror or exc}") from None
        self.written.append(str(path))
        return path
