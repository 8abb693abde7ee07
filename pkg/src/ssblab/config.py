"""Experiment configuration: loading, unit parsing and schema checks.

A config is a YAML mapping with the keys ``experiment``, ``parameters``,
``seed`` and ``output_dir``.  Physical inputs of the estimates experiment
may carry units as string suffixes ("1 eV", "1 mm"); everything else is in
natural units and must be a plain number.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import yaml
from scipy import constants

from .errors import ConfigError

TOP_LEVEL_KEYS = ("experiment", "parameters", "seed", "output_dir")
DEFAULT_OUTPUT_DIR = "results"

# unit -> (dimension, factor to SI)
UNITS = {
    "m": ("length", 1.0), "cm": ("length", 1e-2), "mm": ("length", 1e-3), "um": ("length", 1e-6),
    "nm": ("length", 1e-9), "angstrom": ("length", 1e-10), "A": ("length", 1e-10),
    "J": ("energy", 1.0), "eV": ("energy", constants.e), "meV": ("energy", 1e-3 * constants.e),
    "keV": ("energy", 1e3 * constants.e),
    "kg": ("mass", 1.0), "g": ("mass", 1e-3), "u": ("mass", constants.atomic_mass), "m_p": ("mass", constants.m_p),
    "s": ("time", 1.0), "ms": ("time", 1e-3), "us": ("time", 1e-6), "ns": ("time", 1e-9),
    "ps": ("time", 1e-12), "fs": ("time", 1e-15),
    "m/s": ("speed", 1.0), "km/s": ("speed", 1e3),
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z_/]*)\s*$")


def parse_quantity(value: Any, dimension: str | None, path: str) -> float:
    """A number, or for dimensioned inputs a "<number> <unit>" string, in SI."""
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a number, got {type(value).__name__}")
    m = _QUANTITY.match(value)
    if not m:
        raise ConfigError(path, f"cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), m.group(2)
    if not unit:
        return number
    if dimension is None:
        raise ConfigError(path, f"units are not accepted here (natural units), got {value!r}")
    if unit not in UNITS:
        raise ConfigError(path, f"unknown unit {unit!r}")
    dim, factor = UNITS[unit]
    if dim != dimension:
        raise ConfigError(path, f"unit {unit!r} measures {dim}, expected {dimension}")
    return number * factor


@dataclass(frozen=True)
class Param:
    """One entry of an experiment's parameter schema.

    kind is one of float, int, str, bool, floats (list of float), ints, mapping.
    """

    name: str
    kind: str
    default: Any = None
    dimension: str | None = None
    check: str | None = None  # positive, nonnegative, unit_interval
    choices: tuple | None = None
    required: bool = False
    help: str = ""


def _coerce_float(v, p: Param, path: str) -> float:
    x = parse_quantity(v, p.dimension, path)
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if p.check == "positive" and not x > 0:
        raise ConfigError(path, f"must be positive, got {x}")
    if p.check == "nonnegative" and not x >= 0:
        raise ConfigError(path, f"must be non-negative, got {x}")
    if p.check == "unit_interval" and not 0 < x < 1:
        raise ConfigError(path, f"must lie in (0, 1), got {x}")
    return x


def _coerce_int(v, p: Param, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        else:
            raise ConfigError(path, f"expected an integer, got {v!r}")
    if p.check == "positive" and v < 1:
        raise ConfigError(path, f"must be a positive integer, got {v}")
    if p.check == "nonnegative" and v < 0:
        raise ConfigError(path, f"must be non-negative, got {v}")
    return v


def _coerce(v, p: Param, path: str):
    if p.kind == "float":
        return _coerce_float(v, p, path)
    if p.kind == "int":
        return _coerce_int(v, p, path)
    if p.kind == "bool":
        if not isinstance(v, bool):
            raise ConfigError(path, f"expected true or false, got {v!r}")
        return v
    if p.kind == "str":
        if not isinstance(v, str):
            raise ConfigError(path, f"expected a string, got {v!r}")
        if p.choices and v not in p.choices:
            raise ConfigError(path, f"must be one of {', '.join(p.choices)}; got {v!r}")
        return v
    if p.kind in ("floats", "ints"):
        if not isinstance(v, (list, tuple)) or not v:
            raise ConfigError(path, "expected a non-empty list")
        item = Param(p.name, p.kind[:-1], dimension=p.dimension, check=p.check)
        return [_coerce(x, item, f"{path}[{i}]") for i, x in enumerate(v)]
    if p.kind == "mapping":
        if not isinstance(v, dict):
            raise ConfigError(path, "expected a mapping")
        return v
    raise AssertionError(f"bad schema kind {p.kind}")


def resolve_parameters(schema: list[Param], raw: dict | None, path: str = "parameters") -> dict:
    """Check ``raw`` against the schema, filling defaults; unknown keys are errors."""
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a mapping")
    known = {p.name: p for p in schema}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown key")
    out = {}
    for p in schema:
        if p.name in raw and raw[p.name] is not None:
            out[p.name] = _coerce(raw[p.name], p, f"{path}.{p.name}")
        elif p.required:
            raise ConfigError(f"{path}.{p.name}", "missing required key")
        else:
            out[p.name] = p.default
    return out


def load_config(path: str | Path) -> dict:
    """Read a YAML config, or the ``config`` block of an emitted metadata file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"not valid YAML: {exc}") from None
    if data is None:
        raise ConfigError(str(path), "config is empty")
    if not isinstance(data, dict):
        raise ConfigError(str(path), "config must be a mapping")
    if "config" in data and "artifact" in data:
        data = data["config"]
    return data


def check_top_level(cfg: dict, experiments: Callable[[str], bool]) -> None:
    for key in cfg:
        if key not in TOP_LEVEL_KEYS:
            raise ConfigError(str(key), "unknown key")
    if "experiment" not in cfg:
        raise ConfigError("experiment", "missing required key")
    if not isinstance(cfg["experiment"], str) or not experiments(cfg["experiment"]):
        raise ConfigError("experiment", f"unknown experiment {cfg['experiment']!r}")
    seed = cfg.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"must be a non-negative integer, got {seed!r}")
    if "output_dir" in cfg and not isinstance(cfg["output_dir"], str):
        raise ConfigError("output_dir", "must be a string")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_hash(cfg: dict) -> str:
    """sha256 over the computational content (output_dir excluded)."""
    core = {k: v for k, v in cfg.items() if k != "output_dir"}
    return hashlib.sha256(canonical_json(core).encode()).hexdigest()[:16]
