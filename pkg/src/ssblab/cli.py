"""Command-line runner: ``ssblab run <config>`` and ``ssblab validate <config>``.

Exit codes: 0 on success, 2 for configuration errors (the message names the
offending key), 3 for numerical or validity failures inside a module.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import platform
import sys
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .config import DEFAULT_OUTPUT_DIR, check_top_level, config_hash, load_config, resolve_parameters
from .errors import ConfigError, SSBLabError
from .experiments import EXPERIMENTS, Result

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
log = logging.getLogger("ssblab")


def _plain(x: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-friendly Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


def resolve(cfg: dict, seed: int | None = None, output_dir: str | None = None) -> dict:
    """Validate a raw config and return it with every parameter resolved."""
    check_top_level(cfg, lambda name: name in EXPERIMENTS)
    exp = EXPERIMENTS[cfg["experiment"]]
    params = resolve_parameters(exp.schema, cfg.get("parameters"))
    return {
        "experiment": exp.name,
        "parameters": _plain(params),
        "seed": int(cfg.get("seed", 0) if seed is None else seed),
        "output_dir": output_dir or cfg.get("output_dir", DEFAULT_OUTPUT_DIR),
    }


def prepare(resolved: dict) -> dict:
    exp = EXPERIMENTS[resolved["experiment"]]
    return exp.prepare(resolved["parameters"], resolved["seed"])


def _format_cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(path: Path, columns: dict, header: list[str]) -> None:
    lengths = {len(v) for v in columns.values()}
    if len(lengths) > 1:
        raise SSBLabError(f"table {path.name} has columns of unequal length")
    rows = zip(*columns.values())
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns.keys())
        for row in rows:
            w.writerow([_format_cell(v) for v in row])


def write_outputs(result: Result, resolved: dict) -> list[Path]:
    """Tables as CSV, records as JSON, run metadata in metadata.json."""
    out = Path(resolved["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    h = config_hash(resolved)
    header = [f"ssblab {__version__}", f"experiment: {resolved['experiment']}", f"config_hash: {h}",
              f"seed: {resolved['seed']}"]
    written = []
    for name, cols in result.tables.items():
        p = out / f"{name}.csv"
        write_table(p, cols, header)
        written.append(p)
    for name, rec in result.records.items():
        p = out / f"{name}.json"
        body = {"config_hash": h, "experiment": resolved["experiment"], "data": _plain(rec)}
        p.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
        written.append(p)
    meta = {
        "artifact": "ssblab",
        "version": __version__,
        "config_hash": h,
        "config": {k: v for k, v in resolved.items() if k != "output_dir"},
        "files": sorted(p.name for p in written),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    p = out / "metadata.json"
    p.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written


def run_config(cfg: dict, seed: int | None = None, output_dir: str | None = None) -> tuple[dict, Result, list[Path]]:
    resolved = resolve(cfg, seed, output_dir)
    prep = prepare(resolved)
    exp = EXPERIMENTS[resolved["experiment"]]
    result = exp.run(resolved["parameters"], prep, resolved["seed"])
    return resolved, result, write_outputs(result, resolved)


def validate_config(cfg: dict, seed: int | None = None, output_dir: str | None = None) -> dict:
    """Dry run: resolved parameters plus cost estimate, no computation."""
    resolved = resolve(cfg, seed, output_dir)
    prep = prepare(resolved)
    exp = EXPERIMENTS[resolved["experiment"]]
    return {"config_hash": config_hash(resolved), **resolved,
            "cost": _plain(exp.cost(resolved["parameters"], prep))}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssblab", description="Run symmetry-breaking experiments from a config.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run an experiment and write its tables"),
                       ("validate", "check a config and report the resolved parameters and cost")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="YAML config, or a metadata.json from an earlier run")
        p.add_argument("--output-dir", help="directory for tables (overrides the config)")
        p.add_argument("--seed", type=int, help="random seed (overrides the config)")
        p.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s: %(message)s")
    if args.seed is not None and args.seed < 0:
        print("error: --seed: must be a non-negative integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            report = validate_config(cfg, args.seed, args.output_dir)
            if not args.quiet:
                print(yaml.safe_dump(report, sort_keys=False), end="")
            return EXIT_OK
        resolved, result, files = run_config(cfg, args.seed, args.output_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SSBLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if not args.quiet:
        print(f"{resolved['experiment']} (config {config_hash(resolved)}, seed {resolved['seed']})")
        for line in result.summary:
            print(f"  {line}")
        print(f"wrote {len(files)} files to {resolved['output_dir']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
