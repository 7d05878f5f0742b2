"""Command-line entry point: ``holblock {analyze,simulate,route,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from ..analytics import SpecError
from ..routing import TransportNetwork, UnknownNode
from .config import ConfigError, ExperimentSpec, SchemaViolation, load_config
from .emit import emit_results
from .sweep import run_sweep

log = logging.getLogger("holblock")

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def parse_seeds(text: str) -> tuple[int, ...]:
    """``"1,2,5"`` or ``"1-10"`` (inclusive) or a mix."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if not part.replace("-", "").isdigit():
            raise argparse.ArgumentTypeError(f"bad seed {part!r}")
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return tuple(seeds)


def _node_arg(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holblock", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analyze", "closed-form waiting time for one intersection or a sweep"),
        ("simulate", "simulate an intersection (or every sweep point) across seeds"),
        ("route", "shortest-delay route, blocking-aware and/or baseline"),
        ("sweep", "run the sweep described in the config"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="TOML or JSON experiment document")
        sp.add_argument("--output", help="write results here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--seed", type=parse_seeds, help="seed list, e.g. 1-10 or 3,7")
        sp.add_argument("--horizon", type=int, help="slots per simulation run")
        sp.add_argument("--mode", choices=("aware", "baseline", "both"))
        sp.add_argument("--workers", type=int, default=1, help="parallel seed runs")
        if name == "route":
            sp.add_argument("--from", dest="source", type=_node_arg)
            sp.add_argument("--to", dest="target", type=_node_arg)
        if name == "sweep":
            sp.add_argument("--simulate", action="store_true", help="also simulate each point")
    return p


def _experiment(args) -> ExperimentSpec:
    cfg = load_config(args.config)
    if isinstance(cfg, TransportNetwork):
        if args.command != "route":
            raise SchemaViolation("intersection", "a bare network document can only be routed")
        cfg = ExperimentSpec(kind="route", network=cfg)
    changes = {}
    if args.command == "route":
        if args.source is not None:
            changes["source"] = args.source
        if args.target is not None:
            changes["target"] = args.target
        if cfg.network is None:
            raise SchemaViolation("network", "route needs a network block")
        if cfg.sweep is None:
            changes["kind"] = "route"
    elif args.command == "analyze":
        changes["simulate"] = False
    elif args.command == "simulate":
        changes["simulate"] = True
    elif args.command == "sweep":
        if cfg.sweep is None:
            raise SchemaViolation("sweep", "required field is missing")
        if args.simulate:
            changes["simulate"] = True
    if args.seed is not None:
        changes["seeds"] = args.seed
    if args.horizon is not None:
        if args.horizon < 10_000:
            raise SchemaViolation("--horizon", "horizon must be at least 10000 slots")
        changes["horizon"] = args.horizon
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.format is not None:
        changes["format"] = args.format
    ex = dataclasses.replace(cfg, **changes)
    if ex.kind == "route" or args.command == "route":
        if ex.source is None or ex.target is None:
            raise SchemaViolation("route", "route endpoints are required (config [route] or --from/--to)")
        ex.network.node(ex.source)
        ex.network.node(ex.target)
    return ex


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        ex = _experiment(args)
        rows = run_sweep(ex, workers=args.workers)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, SpecError, UnknownNode) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("%d rows", len(rows))
    out = args.output or ex.output
    try:
        text = emit_results(rows, ex.format, out)
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
