"""Command-line interface.

Subcommands:

* ``fit``        -- run one boosting configuration on a CSV dataset,
                    writing a learning-curve CSV and a serialized ensemble;
* ``experiment`` -- run a named experiment from a JSON config;
* ``verify``     -- run the oracle self-check suite.

Exit codes: 0 success, 1 validation error (bad flags, files or config),
2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .engine import run_boost
from .experiments import (
    EXPERIMENT_NAMES,
    boost_config_from_dict,
    default_experiment_config,
    experiment_config_from_dict,
    run_experiment,
    write_curves_csv,
)
from .simdata import load_csv
from .verification import verify

__all__ = ["main"]


def _build_parser():
    p = argparse.ArgumentParser(prog="boostlab")
    sub = p.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="run one boosting configuration")
    fit.add_argument("--data", required=True, help="training CSV")
    fit.add_argument("--holdout", help="optional holdout CSV")
    fit.add_argument("--config", help="JSON boosting config (defaults if omitted)")
    fit.add_argument("--out-dir", default=".", help="output directory")

    exp = sub.add_parser("experiment", help="run a named experiment")
    exp.add_argument("--name", choices=EXPERIMENT_NAMES)
    exp.add_argument("--config", help="JSON experiment config")
    exp.add_argument("--out-dir", help="output directory override")

    sub.add_parser("verify", help="run the oracle self-check suite")
    return p


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON in {path}: {exc}") from exc


def _cmd_fit(args):
    cfg = boost_config_from_dict(_load_json(args.config) if args.config else {})
    train = load_csv(args.data)
    holdout = load_csv(args.holdout) if args.holdout else None
    os.makedirs(args.out_dir, exist_ok=True)
    ensemble, curves = run_boost(train, holdout, cfg)
    write_curves_csv(os.path.join(args.out_dir, "curves.csv"), curves)
    with open(os.path.join(args.out_dir, "ensemble.txt"), "w") as fh:
        fh.write(ensemble.to_text())
    return 0


def _cmd_experiment(args):
    if args.config:
        d = _load_json(args.config)
        if args.name:
            d.setdefault("name", args.name)
            if d["name"] != args.name:
                raise ValueError("--name conflicts with the config's name")
        if args.out_dir:
            d["out_dir"] = args.out_dir
        cfg = experiment_config_from_dict(d)
    elif args.name:
        cfg = default_experiment_config(args.name, out_dir=args.out_dir or ".")
    else:
        raise ValueError("experiment needs --name or --config")
    run_experiment(cfg)
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "fit":
            return _cmd_fit(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return 0 if verify() else 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
