"""Experiment-runner command line.

    mamimo <experiment> [--config PATH] [--seed N] [--trials N]
                        [--threads N] [--out DIR] [--format csv|json]
                        [--set key=value ...]
    mamimo validate <experiment> [same flags]
    mamimo list

Defaults for every experiment are the reference values, so running a figure
id with no arguments is the reproduction command. Configuration files are
YAML/JSON mappings of parameter overrides (a previously written manifest also
works: its "parameters" block is used). Flags win over the config file.
Output goes to --out, the MAMIMO_OUT environment variable, or ./results.

Exit codes: 0 ok, 2 configuration error, 3 infeasible parameters.
"""

import argparse
import os
import sys
import time

import yaml

from ..errors import InfeasibleError, MamimoError
from . import experiments
from .manifest import write_manifest, write_table
from .runner import default_threads

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


class ConfigError(Exception):
    pass


def _coerce(name: str, value, default):
    try:
        if isinstance(default, bool):
            return bool(int(value))
        if isinstance(default, int) and not isinstance(default, bool):
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid value for parameter '{name}': {value!r}") from e


def load_config(path: str) -> dict:
    with open(path) as f:
        doc = yaml.safe_load(f)
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping")
    if "parameters" in doc and isinstance(doc["parameters"], dict):
        out = dict(doc["parameters"])
        if "seed" in doc:
            out.setdefault("seed", doc["seed"])
        return out
    return doc


def resolve_params(name: str, config: dict | None, sets: list[str]) -> tuple[dict, dict]:
    """Merge defaults <- config file <- --set flags; reject unknown keys.

    Returns (params, reserved) where reserved holds seed/trials overrides that
    a config file may carry.
    """
    spec = experiments.EXPERIMENTS[name]
    params = dict(spec["defaults"])
    reserved = {}
    merged = dict(config or {})
    for item in sets or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        merged[key.strip()] = value.strip()
    for key, value in merged.items():
        if key in ("seed", "trials", "threads"):
            reserved[key] = int(value)
            continue
        if key not in params:
            raise ConfigError(f"unknown parameter '{key}' for experiment '{name}'")
        params[key] = _coerce(key, value, params[key])
    return params, reserved


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mamimo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    names = list(experiments.EXPERIMENTS) + ["validate", "list"]
    for name in names:
        sp = sub.add_parser(
            name,
            help=(
                experiments.EXPERIMENTS[name]["description"]
                if name in experiments.EXPERIMENTS
                else None
            ),
        )
        if name == "list":
            continue
        if name == "validate":
            sp.add_argument("experiment", choices=list(experiments.EXPERIMENTS))
        sp.add_argument("--config", help="YAML/JSON parameter file (or a manifest)")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one experiment parameter")
    return p


def run(name: str, args) -> int:
    spec = experiments.EXPERIMENTS[name]
    config = load_config(args.config) if args.config else None
    params, reserved = resolve_params(name, config, args.set)
    seed = args.seed if args.seed is not None else reserved.get("seed", 1)
    trials = args.trials if args.trials is not None else reserved.get("trials", spec["trials"])
    threads = args.threads if args.threads is not None else reserved.get("threads", default_threads())
    out_root = args.out or os.environ.get("MAMIMO_OUT") or "results"

    start = time.monotonic()
    columns, rows, notes = spec["runner"](params, seed, trials, threads)
    elapsed = time.monotonic() - start

    os.makedirs(out_root, exist_ok=True)
    data_path = os.path.join(out_root, f"{name}.{args.format}")
    write_table(data_path, columns, rows, args.format)
    write_manifest(
        os.path.join(out_root, f"{name}.manifest.json"),
        experiment=name,
        parameters={**params, "trials": trials},
        seed=seed,
        row_count=len(rows),
        wall_clock_s=elapsed,
        notes=notes,
    )
    print(f"{name}: {len(rows)} rows -> {data_path} ({elapsed:.1f}s)")
    return EXIT_OK


def run_validate(args) -> int:
    name = args.experiment
    config = load_config(args.config) if args.config else None
    params, reserved = resolve_params(name, config, args.set)
    trials = args.trials if args.trials is not None else reserved.get(
        "trials", experiments.EXPERIMENTS[name]["trials"]
    )
    for level, message in experiments.validate(name, params, trials):
        print(f"[{level}] {message}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name, spec in experiments.EXPERIMENTS.items():
                print(f"{name:10s} {spec['description']}")
            return EXIT_OK
        if args.command == "validate":
            return run_validate(args)
        return run(args.command, args)
    except (ConfigError, FileNotFoundError, yaml.YAMLError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as e:
        print(f"infeasible parameters: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except MamimoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
