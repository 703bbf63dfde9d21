"""Command line entry point: ``shiftrate <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigInvalid
from .experiments import (EXIT_CONFIG, ExperimentConfig, RunReport, run, run_suite)

# subcommand -> experiment kind (``rate`` picks its system with --system)
SUBCOMMANDS = {
    "classify": "classify", "orbits": "orbits", "delta": "delta", "rate": None,
    "walsh": "rate-baker", "laguerre": "rate-laguerre", "modulus": "modulus",
    "discrepancy": "discrepancy", "maximal": "maximal", "witness": "witness",
}


def _common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="YAML/JSON experiment config")
    p.add_argument("--out", default=S, help="output directory (default: runs)")
    p.add_argument("--seed", type=int, default=S, help="unsigned 64-bit seed")
    p.add_argument("--threads", type=int, default=S, help="worker processes for independent points")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="arithmetic", action="store_const", const="exact", default=S)
    mode.add_argument("--float", dest="arithmetic", action="store_const", const="float", default=S)


def _toral(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--matrix", default=S, help='integer rows as JSON, e.g. "[[1,1],[1,0]]"')
    p.add_argument("--eta", type=float, default=S)
    p.add_argument("--nmax", type=int, default=S)
    p.add_argument("--denominator-bits", dest="denominator_bits", type=int, default=S)
    p.add_argument("--domain", choices=["box", "disk", "poly", "halfplane"], default=S)
    p.add_argument("--param", action="append", default=S, metavar="KEY=JSON",
                   help="module parameter override (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shiftrate", description="Convergence-rate experiments for shift operators.")
    _common(parser)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        _common(sp)
        _toral(sp)
        if name == "rate":
            sp.add_argument("--system", choices=["toral", "baker", "laguerre"], default="toral")
    sp = sub.add_parser("suite")
    _common(sp)
    sp.add_argument("name", choices=["quick", "acceptance"])
    sp.add_argument("--sabotage", action="store_true", help="negative control: break one identity check")
    sp.add_argument("--only", default=None, help="comma-separated criterion numbers")
    return parser


def _parse_params(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigInvalid(f"--param expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    kind = SUBCOMMANDS[ns.command] or f"rate-{ns.system}"
    fields = {k: getattr(ns, k) for k in ("out", "seed", "threads", "arithmetic", "matrix", "eta",
                                          "nmax", "denominator_bits", "domain") if hasattr(ns, k)}
    if "matrix" in fields:
        try:
            fields["matrix"] = json.loads(fields["matrix"])
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"--matrix is not valid JSON: {fields['matrix']!r}") from exc
    params = _parse_params(getattr(ns, "param", []))
    if hasattr(ns, "config"):
        cfg = ExperimentConfig.load(ns.config, kind=kind, **fields)
        if params:
            cfg = ExperimentConfig.from_mapping({**cfg.echo(), "params": {**cfg.params, **params}})
        return cfg
    return ExperimentConfig.from_mapping({"kind": kind, **fields, "params": params})


def _print_report(rep: RunReport) -> None:
    for c in rep.checks:
        mark = "ok  " if c.passed else "FAIL"
        print(f"{mark} {c.name}: {c.lhs} {c.relation} {c.rhs}")
    print(f"status: {rep.status}" + (f" ({rep.error})" if rep.error else ""))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "suite":
            only = [int(v) for v in ns.only.split(",")] if ns.only else None
            rep = run_suite(ns.name, seed=getattr(ns, "seed", 0), out=getattr(ns, "out", "runs"),
                            sabotage=ns.sabotage, only=only, echo=print)
            print(f"status: {rep.status}")
            return rep.exit_code
        cfg = config_from_args(ns)
    except (ConfigInvalid, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rep = run(cfg)
    _print_report(rep)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
