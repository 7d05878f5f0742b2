"""Experiment and network documents (TOML, or JSON with the same tree).

An intersection is described by a table like::

    [intersection]
    model = "I"                   # "I" or "II"
    rates = [0.1, 0.1, 0.1]       # left, straight, right  (Model II: straight+right, left)
    phases = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
    p_t = 0.5

Model II also accepts per-direction ``left``/``straight``/``right`` rates in
place of ``rates``; straight and right are merged into one lane.  A network
lists ``[[network.nodes]]`` (``id`` plus optional ``intersection``) and
``[[network.edges]]`` (``from``, ``to``, ``length``, optional ``speed``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
import tomli_w

from ..analytics import ArrivalSpec, IntersectionSpec, Model, SpecError
from ..routing import EdgeSpec, Mode, NodeSpec, TransportNetwork

__all__ = [
    "ConfigError",
    "SchemaViolation",
    "SemanticViolation",
    "SweepSpec",
    "ExperimentSpec",
    "parse_config",
    "load_config",
    "parse_intersection",
    "parse_network",
    "dump_network",
    "network_tree",
    "KINDS",
    "AXES",
]

KINDS = ("analyze", "simulate", "route", "sweep")
AXES = ("total_rate", "p_t", "node_rate", "node_p_t")
FORMATS = ("csv", "json")
DEFAULT_SEEDS = tuple(range(1, 11))
DEFAULT_HORIZON = 1_000_000


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SchemaViolation(ConfigError):
    """Missing field or wrong type."""


class SemanticViolation(ConfigError):
    """Well-typed but meaningless value (probabilities not summing to 1, ...)."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    p_t_values: tuple[float | None, ...] = (None,)
    node: Any = None


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    intersection: IntersectionSpec | None = None
    network: TransportNetwork | None = None
    source: Any = None
    target: Any = None
    sweep: SweepSpec | None = None
    simulate: bool = False
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    horizon: int = DEFAULT_HORIZON
    warmup: int | None = None
    mode: str = "both"
    output: str | None = None
    format: str = "csv"


# -- typed field access ---------------------------------------------------

def _get(tree: dict, key: str, path: str, kind, required=True, default=None):
    if key not in tree:
        if required:
            raise SchemaViolation(f"{path}.{key}" if path else key, "required field is missing")
        return default
    value = tree[key]
    where = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaViolation(where, f"expected a number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaViolation(where, f"expected an integer, got {type(value).__name__}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise SchemaViolation(where, f"expected an array, got {type(value).__name__}")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise SchemaViolation(where, f"expected a table, got {type(value).__name__}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise SchemaViolation(where, f"expected a string, got {type(value).__name__}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise SchemaViolation(where, f"expected true/false, got {type(value).__name__}")
        return value
    return value


def _numbers(values: list, where: str) -> tuple[float, ...]:
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaViolation(f"{where}[{i}]", "expected a number")
        out.append(float(v))
    return tuple(out)


def parse_intersection(tree: dict, path: str = "intersection") -> IntersectionSpec:
    if not isinstance(tree, dict):
        raise SchemaViolation(path, "expected a table")
    model_raw = _get(tree, "model", path, str)
    try:
        model = Model.parse(model_raw)
    except SpecError as exc:
        raise SemanticViolation(f"{path}.model", str(exc)) from None
    if "rates" in tree:
        rates = _numbers(_get(tree, "rates", path, list), f"{path}.rates")
    elif model is Model.II and "left" in tree:
        left = _get(tree, "left", path, float)
        straight = _get(tree, "straight", path, float, required=False, default=0.0)
        right = _get(tree, "right", path, float, required=False, default=0.0)
        rates = ArrivalSpec.merged(left, straight, right).rates
    elif model is Model.I and "left" in tree:
        rates = tuple(_get(tree, k, path, float) for k in ("left", "straight", "right"))
    else:
        raise SchemaViolation(f"{path}.rates", "required field is missing")
    if len(rates) != model.n_classes:
        raise SemanticViolation(f"{path}.rates",
                                f"Model {model.value} needs {model.n_classes} rates, got {len(rates)}")
    for i, r in enumerate(rates):
        if r < 0 or not math.isfinite(r):
            raise SemanticViolation(f"{path}.rates[{i}]", f"rate must be finite and >= 0, got {r}")
    phases = _numbers(_get(tree, "phases", path, list), f"{path}.phases")
    p_t = _get(tree, "p_t", path, float, required=False, default=0.0)
    try:
        return IntersectionSpec.build(model, rates, phases, p_t)
    except SpecError as exc:
        block = "phases" if "phase" in str(exc) else "p_t" if "communication" in str(exc) else ""
        raise SemanticViolation(f"{path}.{block}" if block else path, str(exc)) from None


def _node_id(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise SchemaViolation(where, "node id must be an integer or a string")
    return value


def parse_network(tree: dict, path: str = "network") -> TransportNetwork:
    if not isinstance(tree, dict):
        raise SchemaViolation(path, "expected a table")
    speed = _get(tree, "speed", path, float, required=False, default=1.0)
    if speed <= 0:
        raise SemanticViolation(f"{path}.speed", "speed must be positive")
    nodes = []
    for i, nt in enumerate(_get(tree, "nodes", path, list)):
        where = f"{path}.nodes[{i}]"
        if not isinstance(nt, dict):
            raise SchemaViolation(where, "expected a table")
        nid = _node_id(_get(nt, "id", where, None), f"{where}.id")
        inter = parse_intersection(nt["intersection"], f"{where}.intersection") if "intersection" in nt else None
        nodes.append(NodeSpec(nid, inter))
    edges = []
    for i, et in enumerate(_get(tree, "edges", path, list)):
        where = f"{path}.edges[{i}]"
        if not isinstance(et, dict):
            raise SchemaViolation(where, "expected a table")
        src = _node_id(_get(et, "from", where, None), f"{where}.from")
        dst = _node_id(_get(et, "to", where, None), f"{where}.to")
        length = _get(et, "length", where, float, required=False, default=0.0)
        espeed = _get(et, "speed", where, float, required=False)
        try:
            edges.append(EdgeSpec(src, dst, length, espeed))
        except SpecError as exc:
            raise SemanticViolation(where, str(exc)) from None
    try:
        return TransportNetwork(nodes, edges, speed)
    except SpecError as exc:
        raise SemanticViolation(path, str(exc)) from None


def _grid(tree: dict, path: str) -> tuple[float, ...]:
    if "values" in tree:
        values = _numbers(_get(tree, "values", path, list), f"{path}.values")
        if not values:
            raise SchemaViolation(f"{path}.values", "sweep range is empty")
        return values
    start = _get(tree, "start", path, float)
    stop = _get(tree, "stop", path, float)
    step = _get(tree, "step", path, float)
    if step <= 0:
        raise SchemaViolation(f"{path}.step", "step must be positive")
    if stop < start:
        raise SchemaViolation(f"{path}.stop", "sweep range is empty (stop < start)")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    # generate from integers so grids carry no accumulated drift
    return tuple(round(start + i * step, 12) for i in range(n))


def _seeds(value, where) -> tuple[int, ...]:
    if isinstance(value, int) and not isinstance(value, bool):
        return (value,)
    if not isinstance(value, list) or not value:
        raise SchemaViolation(where, "expected a non-empty array of integers")
    for i, s in enumerate(value):
        if isinstance(s, bool) or not isinstance(s, int):
            raise SchemaViolation(f"{where}[{i}]", "expected an integer")
    return tuple(value)


def _experiment(tree: dict) -> ExperimentSpec:
    kind = _get(tree, "kind", "", str, required=False)
    has_net = "network" in tree
    if kind is None:
        kind = "sweep" if "sweep" in tree else "route" if has_net else "analyze"
    if kind not in KINDS:
        raise SchemaViolation("kind", f"expected one of {KINDS}, got {kind!r}")

    inter = parse_intersection(tree["intersection"]) if "intersection" in tree else None
    net = parse_network(tree["network"]) if has_net else None
    if inter is None and net is None:
        raise SchemaViolation("intersection", "an intersection or network block is required")

    source = target = None
    if "route" in tree:
        rt = _get(tree, "route", "", dict)
        source = _node_id(_get(rt, "from", "route", None), "route.from")
        target = _node_id(_get(rt, "to", "route", None), "route.to")
        if net is None:
            raise SchemaViolation("network", "route endpoints need a network block")
        for key, nid in (("from", source), ("to", target)):
            if nid not in {n.id for n in net.nodes}:
                raise SemanticViolation(f"route.{key}", f"unknown node {nid!r}")
    if kind == "route" and source is None:
        raise SchemaViolation("route", "required field is missing")

    sweep = None
    if "sweep" in tree:
        st = _get(tree, "sweep", "", dict)
        axis = _get(st, "axis", "sweep", str)
        if axis not in AXES:
            raise SchemaViolation("sweep.axis", f"expected one of {AXES}, got {axis!r}")
        values = _grid(st, "sweep")
        p_ts = (None,)
        if "p_t" in st:
            if axis in ("p_t", "node_p_t"):
                raise SchemaViolation("sweep.p_t", f"a p_t series cannot be combined with axis {axis!r}")
            p_ts = _numbers(_get(st, "p_t", "sweep", list), "sweep.p_t")
            if not p_ts:
                raise SchemaViolation("sweep.p_t", "sweep range is empty")
        node = None
        if axis.startswith("node_"):
            if net is None or source is None:
                raise SchemaViolation("sweep.node", f"axis {axis!r} needs a network and route block")
            node = _node_id(_get(st, "node", "sweep", None), "sweep.node")
            found = [n for n in net.nodes if n.id == node]
            if not found:
                raise SemanticViolation("sweep.node", f"unknown node {node!r}")
            if found[0].intersection is None:
                raise SemanticViolation("sweep.node", f"node {node!r} has no intersection to vary")
        elif inter is None:
            raise SchemaViolation("intersection", f"axis {axis!r} needs an intersection block")
        for v in (values if axis in ("p_t", "node_p_t") else ()):
            if not 0.0 <= v <= 1.0:
                raise SemanticViolation("sweep.values", f"p_t value {v} outside [0, 1]")
        for v in (values if axis in ("total_rate", "node_rate") else ()):
            if v < 0:
                raise SemanticViolation("sweep.values", f"rate {v} is negative")
        for v in p_ts:
            if v is not None and not 0.0 <= v <= 1.0:
                raise SemanticViolation("sweep.p_t", f"p_t value {v} outside [0, 1]")
        sweep = SweepSpec(axis, values, p_ts, node)
    if kind in ("analyze", "simulate") and inter is None:
        raise SchemaViolation("intersection", f"kind {kind!r} needs an intersection block")
    if kind == "sweep" and sweep is None:
        raise SchemaViolation("sweep", "required field is missing")

    sim = tree.get("simulation", {})
    if not isinstance(sim, dict):
        raise SchemaViolation("simulation", "expected a table")
    enabled = _get(sim, "enabled", "simulation", bool, required=False, default=(kind == "simulate"))
    seeds = _seeds(sim["seeds"], "simulation.seeds") if "seeds" in sim else DEFAULT_SEEDS
    horizon = _get(sim, "horizon", "simulation", int, required=False, default=DEFAULT_HORIZON)
    warmup = _get(sim, "warmup", "simulation", int, required=False)
    if horizon < 10_000:
        raise SemanticViolation("simulation.horizon", "horizon must be at least 10000 slots")
    if warmup is not None and not 0 <= warmup < horizon:
        raise SemanticViolation("simulation.warmup", "warmup must lie in [0, horizon)")

    out = tree.get("output", {})
    if not isinstance(out, dict):
        raise SchemaViolation("output", "expected a table")
    fmt = _get(out, "format", "output", str, required=False, default="csv")
    if fmt not in FORMATS:
        raise SchemaViolation("output.format", f"expected one of {FORMATS}")
    opath = _get(out, "path", "output", str, required=False)
    mode = _get(tree, "mode", "", str, required=False, default="both")
    if mode not in ("aware", "baseline", "both"):
        raise SchemaViolation("mode", "expected aware, baseline or both")

    return ExperimentSpec(kind=kind, intersection=inter, network=net, source=source, target=target,
                          sweep=sweep, simulate=enabled, seeds=seeds, horizon=horizon,
                          warmup=warmup, mode=mode, output=opath, format=fmt)


def _decode(text: str, fmt: str | None) -> dict:
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    try:
        tree = json.loads(text) if fmt == "json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise SchemaViolation("", f"malformed {fmt.upper()} document: {exc}") from None
    if not isinstance(tree, dict):
        raise SchemaViolation("", "top level must be a table")
    return tree


def parse_config(text: str, fmt: str | None = None) -> ExperimentSpec | TransportNetwork:
    """Validate a configuration document.

    A document holding only a ``[network]`` table yields a
    :class:`TransportNetwork`; anything else yields an :class:`ExperimentSpec`.
    """
    tree = _decode(text, fmt)
    if set(tree) == {"network"}:
        return parse_network(tree["network"])
    return _experiment(tree)


def load_config(path: str | Path) -> ExperimentSpec | TransportNetwork:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_config(text, "json" if p.suffix.lower() == ".json" else None)


def intersection_tree(spec: IntersectionSpec) -> dict:
    return {
        "model": spec.model.value,
        "rates": list(spec.arrivals.rates),
        "phases": list(spec.phases.probs),
        "p_t": spec.comm.p_t,
    }


def network_tree(net: TransportNetwork) -> dict:
    nodes = []
    for n in net.nodes:
        entry: dict[str, Any] = {"id": n.id}
        if n.intersection is not None:
            entry["intersection"] = intersection_tree(n.intersection)
        nodes.append(entry)
    edges = []
    for e in net.edges:
        entry = {"from": e.source, "to": e.target, "length": e.length}
        if e.speed is not None:
            entry["speed"] = e.speed
        edges.append(entry)
    return {"speed": net.speed, "nodes": nodes, "edges": edges}


def dump_network(net: TransportNetwork, fmt: str = "toml") -> str:
    tree = {"network": network_tree(net)}
    if fmt == "json":
        return json.dumps(tree, indent=2)
    return tomli_w.dumps(tree)
