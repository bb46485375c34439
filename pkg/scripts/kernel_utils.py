"""
Common functions: reading configuration and resolving output locations.
Single-source to avoid duplication in other scripts.
"""
from __future__ import annotations
import os
import copy
import pathlib
import logging
import typing as _t

import tomli
import tomli_w

# ───────────────────────────────────────── Logging Setup ────
# Library modules only emit records; executable entry points set their own basicConfig.

# ───────────────────────────────────────── Constants & Config ────
ROOT = pathlib.Path(__file__).resolve().parents[1]
CFG_PATH = ROOT / "kernels.toml"
OUTPUT_ENV_VAR = "JK_OUTPUT_DIR"

DEFAULT_CFG = {
    "specfun": {
        "series_tolerance": 1e-16,
        "max_terms": 300,
        "asymptotic_switch": 20.0,
    },
    "weight": {
        # f_t is analytic on |z - 1| < disk_radius; 0.6 covers t <= 1.5
        "disk_radius": 0.6,
        "szego_nodes": 400,
    },
    "orthopoly": {
        "quad_factor": 4,
        "reorthogonalize": True,
        "graded_threshold": 1e-3,
    },
    "painleve": {
        "rtol": 1e-10,
        "atol": 1e-12,
        "blowup": 1e8,
        "residual_points": 400,
        "pole_margin": 0.05,
    },
    "sampler": {
        "envelope_grid": 4001,
        "envelope_safety": 1.05,
        "min_efficiency": 0.01,
        "reorth_every": 10,
        "batch": 64,
    },
    "output": {
        "dir": "results",
        "float_format": "%.17g",
    },
    "workers": {
        # 0 sizes the pool from the physical CPU count
        "default": 0,
    },
}


def deep_merge(base: dict, override: dict) -> dict:
    """Return a copy of base with override applied section by section."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_cfg(path: _t.Optional[pathlib.Path] = None) -> dict:
    """Load kernels.toml merged over DEFAULT_CFG; never raises."""
    cfg_path = pathlib.Path(path) if path is not None else CFG_PATH
    if not cfg_path.exists():
        logging.warning(f"Config file {cfg_path} not found, using default configuration.")
        return copy.deepcopy(DEFAULT_CFG)
    try:
        with cfg_path.open("rb") as f:
            return deep_merge(DEFAULT_CFG, tomli.load(f))
    except tomli.TOMLDecodeError as e:
        logging.error(f"Error parsing {cfg_path}: {e}. Using default configuration.")
        return copy.deepcopy(DEFAULT_CFG)
    except IOError as e:
        logging.error(f"Error reading {cfg_path}: {e}. Using default configuration.")
        return copy.deepcopy(DEFAULT_CFG)


def get_output_dir(cfg: _t.Optional[dict] = None, override: _t.Optional[str] = None) -> pathlib.Path:
    """Resolve the output directory: explicit flag, env var, config, then ./results."""
    if override:
        return pathlib.Path(override)
    env_dir = os.environ.get(OUTPUT_ENV_VAR)
    if env_dir:
        return pathlib.Path(env_dir)
    if cfg is None:
        cfg = load_cfg()
    return pathlib.Path(cfg.get("output", {}).get("dir", "results"))


def dump_cfg_snapshot(cfg: dict, flags: dict) -> str:
    """Serialize the resolved configuration and parsed flags as TOML."""
    snapshot = copy.deepcopy(cfg)
    snapshot["run"] = {k: _tomlable(v) for k, v in sorted(flags.items()) if v is not None}
    return tomli_w.dumps(snapshot)


def _tomlable(value: _t.Any) -> _t.Any:
    if isinstance(value, (list, tuple)):
        return [_tomlable(v) for v in value]
    if isinstance(value, (str, int, float, bool)):
        return value
    return str(value)
