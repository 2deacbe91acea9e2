"""Strict JSON experiment configs.

Each command reads one JSON object. Unknown keys are rejected with their
dotted path, so a misspelt exponent name cannot silently fall back to a
default.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .model import ModelParams, ParameterError


class ConfigError(ValueError):
    pass


MODEL_KEYS = {"n", "sigma", "sigma1", "sigma2", "p", "eps"}
GRID_KEYS = {"half_length", "points"}
DATA_KEYS = {"kind", "xi0", "mass"}
INTEGRATOR_KEYS = {"h", "adaptive", "tol", "h_min", "h_max", "max_step", "nonlinear", "dealias",
                   "blowup_threshold"}
SAMPLE_KEYS = {"start", "stop", "num", "spacing"}

TOP_KEYS = {
    "classify": {"rows", "rng_seed", "output_dir"},
    "simulate": {"model", "m", "grid", "data", "integrator", "t_end", "sample_times", "snapshot_times",
                 "rng_seed", "output_dir"},
    "decay": {"model", "m", "grid", "data", "integrator", "t_end", "sample_times", "norms", "window",
              "rng_seed", "output_dir"},
    "lifespan": {"model", "m", "eps_list", "horizon", "setup", "rng_seed", "output_dir"},
    "check": {"only", "rng_seed", "output_dir"},
}
SETUP_KEYS = {"half_length", "points", "kind", "mass", "h", "tol", "h_max", "sample_dt", "threshold_scale"}
ROW_KEYS = MODEL_KEYS | {"m"}


def load(path, command: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    validate(cfg, command)
    return cfg


def _keys(block, allowed, path):
    if not isinstance(block, dict):
        raise ConfigError(f"{path}: expected an object")
    extra = sorted(set(block) - allowed)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}: unknown key" if path else f"{extra[0]}: unknown key")


def _number(block, key, path, required=True, default=None):
    if key not in block:
        if required:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    return v


def validate(cfg: dict, command: str) -> None:
    if command not in TOP_KEYS:
        raise ConfigError(f"unknown command {command}")
    _keys(cfg, TOP_KEYS[command], "")
    if command == "classify":
        rows = cfg.get("rows")
        if not isinstance(rows, list) or not rows:
            raise ConfigError("rows: expected a non-empty list")
        for i, row in enumerate(rows):
            _keys(row, ROW_KEYS, f"rows[{i}]")
            for k in ("n", "sigma", "sigma1", "sigma2"):
                _number(row, k, f"rows[{i}]")
            if row.get("p") != "p_crit":
                _number(row, "p", f"rows[{i}]")
    if "model" in TOP_KEYS[command] and command != "check":
        model_params(cfg, "model")
    if "grid" in cfg:
        _keys(cfg["grid"], GRID_KEYS, "grid")
        _number(cfg["grid"], "half_length", "grid")
        _number(cfg["grid"], "points", "grid")
    if "data" in cfg:
        _keys(cfg["data"], DATA_KEYS, "data")
    if "integrator" in cfg:
        _keys(cfg["integrator"], INTEGRATOR_KEYS, "integrator")
    for k in ("sample_times", "snapshot_times"):
        if k in cfg and isinstance(cfg[k], dict):
            _keys(cfg[k], SAMPLE_KEYS, k)
    if "setup" in cfg:
        _keys(cfg["setup"], SETUP_KEYS, "setup")
    if command in ("simulate", "decay"):
        _number(cfg, "t_end", "")
    if command == "lifespan":
        if not isinstance(cfg.get("eps_list"), list):
            raise ConfigError("eps_list: expected a list of numbers")
        _number(cfg, "horizon", "")


def model_params(cfg: dict, key: str = "model", **override) -> ModelParams:
    block = cfg.get(key)
    if block is None:
        raise ConfigError(f"{key}: missing")
    _keys(block, MODEL_KEYS, key)
    vals = {k: _number(block, k, key) for k in ("n", "sigma", "sigma1", "sigma2", "p")}
    vals["eps"] = _number(block, "eps", key, required=False, default=1.0)
    vals.update(override)
    try:
        return ModelParams(**vals)
    except ParameterError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def sample_grid(spec, t_end: float):
    """Sample times from a list or from ``{start, stop, num, spacing}``."""
    if spec is None:
        return None
    if isinstance(spec, list):
        return [float(x) for x in spec]
    start = float(spec.get("start", 0.0))
    stop = float(spec.get("stop", t_end))
    num = int(spec.get("num", 100))
    spacing = spec.get("spacing", "linear")
    if spacing == "linear":
        return np.linspace(start, stop, num).tolist()
    if spacing == "log":
        if start <= 0:
            raise ConfigError("sample_times.start must be positive for log spacing")
        return np.geomspace(start, stop, num).tolist()
    raise ConfigError(f"sample_times.spacing: unknown value {spacing!r}")


def fmt(x) -> str:
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(x, float):
        return f"{x:.17g}" if math.isfinite(x) else str(x)
    return str(x)
