"""Parameter sweeps over single intersections and routed networks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from ..analytics import IntersectionSpec, waiting_time
from ..routing import Mode, NodeSpec, TransportNetwork, compare_modes
from ..sim import simulate_seeds
from .config import ExperimentSpec, SweepSpec

__all__ = ["ResultRow", "RouteRow", "run_sweep", "scale_total_rate", "INTERSECTION_COLUMNS",
           "ROUTE_COLUMNS"]

INTERSECTION_COLUMNS = ("swept_param", "value", "model", "p_t", "rho", "W_analytic",
                        "W_sim_mean", "W_sim_stderr", "queue_len_mean", "stable", "saturated")
ROUTE_COLUMNS = ("swept_param", "value", "mode", "path", "total_delay", "true_delay", "reachable")


@dataclass(frozen=True)
class ResultRow:
    swept_param: str
    value: float
    model: str
    p_t: float
    rho: float
    W_analytic: float
    W_sim_mean: float = math.nan
    W_sim_stderr: float = math.nan
    queue_len_mean: float = math.nan
    stable: bool = True
    saturated: bool = False

    columns = INTERSECTION_COLUMNS


@dataclass(frozen=True)
class RouteRow:
    swept_param: str
    value: float
    mode: str
    path: tuple[Any, ...]
    total_delay: float
    true_delay: float
    reachable: bool

    columns = ROUTE_COLUMNS


def scale_total_rate(spec: IntersectionSpec, total: float) -> IntersectionSpec:
    """Same turning fractions, new total arrival rate (equal split if the base is empty)."""
    rates = spec.arrivals.rates
    base = spec.arrivals.total_rate
    n = len(rates)
    fracs = [r / base for r in rates] if base > 0 else [1.0 / n] * n
    return spec.with_rates([f * total for f in fracs])


def _intersection_row(axis: str, value: float, spec: IntersectionSpec, ex: ExperimentSpec,
                      workers: int) -> ResultRow:
    rep = waiting_time(spec)
    row = dict(swept_param=axis, value=value, model=spec.model.value, p_t=spec.comm.p_t,
               rho=rep.rho, W_analytic=rep.W, stable=rep.stable)
    if ex.simulate:
        agg = simulate_seeds(spec, ex.seeds, horizon=ex.horizon, warmup=ex.warmup, workers=workers)
        row.update(W_sim_mean=agg.mean_wait, W_sim_stderr=agg.wait_stderr,
                   queue_len_mean=agg.mean_queue_len, saturated=agg.saturated)
    return ResultRow(**row)


def _intersection_points(ex: ExperimentSpec):
    spec = ex.intersection
    sw = ex.sweep
    if sw is None:
        yield "p_t", spec.comm.p_t, spec
        return
    for p_t in sw.p_t_values:
        base = spec if p_t is None else spec.with_comm(p_t)
        for v in sw.values:
            if sw.axis == "total_rate":
                yield sw.axis, v, scale_total_rate(base, v)
            else:
                yield sw.axis, v, base.with_comm(v)


def _modes(ex: ExperimentSpec) -> Sequence[Mode]:
    return (Mode.AWARE, Mode.BASELINE) if ex.mode == "both" else (Mode.parse(ex.mode),)


def _route_rows(axis: str, value: float, net: TransportNetwork, ex: ExperimentSpec) -> list[RouteRow]:
    cmp = compare_modes(net, ex.source, ex.target)
    rows = []
    for mode in _modes(ex):
        r = cmp.aware if mode is Mode.AWARE else cmp.baseline
        true = r.total_delay if mode is Mode.AWARE else cmp.baseline_true_delay
        rows.append(RouteRow(axis, value, mode.value, r.path, r.total_delay, true, r.reachable))
    return rows


def _varied_network(net: TransportNetwork, sw: SweepSpec, value: float) -> TransportNetwork:
    node = net.node(sw.node)
    spec = node.intersection
    spec = scale_total_rate(spec, value) if sw.axis == "node_rate" else spec.with_comm(value)
    return net.with_node(NodeSpec(node.id, spec))


def run_sweep(ex: ExperimentSpec, workers: int = 1) -> list[ResultRow] | list[RouteRow]:
    """Evaluate every sweep point in order; seeds of one point may run in parallel."""
    sw = ex.sweep
    if ex.kind == "route" or (sw is not None and sw.axis.startswith("node_")):
        if sw is None:
            return _route_rows("none", math.nan, ex.network, ex)
        rows = []
        for v in sw.values:
            rows.extend(_route_rows(sw.axis, v, _varied_network(ex.network, sw, v), ex))
        return rows
    return [_intersection_row(axis, v, spec, ex, workers)
            for axis, v, spec in _intersection_points(ex)]
