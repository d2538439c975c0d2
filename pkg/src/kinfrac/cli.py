"""kinfrac <suite> [flags] --config PATH --out DIR"""
from __future__ import annotations

import argparse
import json
import sys

from .exponents import ExponentError
from .report import ConfigError, run_suite, write_outputs

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 2, 3

# suite -> flags (dest, type); everything stays a string so rationals survive
FLAGS = {
    "exponents": ["d", "sigma", "p", "alpha", "beta"],
    "trajectory-check": ["alpha", "beta", "d", "seed", "draws"],
    "decay-check": ["sigma", "family"],
    "kernel-bounds": ["kind", "sigma", "alpha", "beta", "theta"],
    "representation": ["model", "sigma", "p", "tau", "seed", "points"],
    "gn-check": ["model", "sigma", "p", "family-size", "seed"],
    "suppression": ["sigma", "p"],
    "oracle-kolmogorov": ["sigma", "tmax"],
    "critical-integration": ["mu", "nu"],
}


def build_parser():
    ap = argparse.ArgumentParser(prog="kinfrac", description="Verification suites for kinetic fractional estimates.")
    sub = ap.add_subparsers(dest="suite", required=True)
    for name, flags in FLAGS.items():
        sp = sub.add_parser(name)
        for f in flags:
            sp.add_argument(f"--{f}", dest=f.replace("-", "_"), default=None)
        if name == "critical-integration":
            sp.add_argument("--negative-control", dest="negative_control", action="store_true", default=None)
        sp.add_argument("--config", default=None, help="JSON file with suite parameters")
        sp.add_argument("--out", default=None, help="output directory for report.json and data/*.csv")
    return ap


def _coerce(key, val):
    if key in ("d", "seed", "draws", "points", "family_size"):
        try:
            return int(val)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {val!r}") from exc
    return val


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = {}
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
            if not isinstance(cfg, dict):
                raise ConfigError("config file must hold a JSON object")
        for key, val in vars(args).items():
            if key in ("suite", "config", "out") or val is None:
                continue
            cfg[key] = _coerce(key, val)
        rep = run_suite(args.suite, cfg)
    except (ConfigError, ExponentError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"suite": args.suite, "error": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG
    body = rep.body()
    if args.out:
        write_outputs(rep, args.out)
    print(json.dumps(body if args.suite == "exponents" else
                     {"suite": rep.suite, "pass": rep.passed,
                      "checks": [c.as_dict() for c in rep.checks]}, indent=2, sort_keys=True))
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
