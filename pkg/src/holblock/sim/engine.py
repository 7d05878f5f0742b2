"""Slot-based simulation of one intersection approach.

Randomness is drawn in blocks with numpy's Philox counter-based generator and
handed to the slot kernel, so the seed alone fixes every arrival count, turn
class, communication flag and phase draw, independent of backend.

Per slot, a vehicle arriving in slot ``t`` becomes eligible at ``t + 1``.
Its waiting time is the delay from eligibility to the start of its service,
and its service time runs from that point to the slot in which it crosses.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..analytics import IntersectionSpec, Model, SpecError
from . import _backend
from . import _kernel_py as _layout

__all__ = [
    "SimConfig",
    "SimStats",
    "Vehicle",
    "SeedAggregate",
    "simulate",
    "simulate_model1",
    "simulate_model2",
    "simulate_seeds",
    "service_time_samples",
    "default_warmup",
    "saturation_threshold",
]

MIN_HORIZON = 10_000
CHUNK = 1 << 16
HIST_BINS = 257


def default_warmup(horizon: int) -> int:
    w = max(horizon // 100, 10_000)
    if w >= horizon:
        w = horizon // 10
    return w


def saturation_threshold(horizon: int, total_rate: float) -> float:
    return 10.0 * math.sqrt(horizon * total_rate) + 100.0


@dataclass(frozen=True)
class SimConfig:
    spec: IntersectionSpec
    horizon: int = 1_000_000
    warmup: int | None = None
    seed: int = 1
    batches: int = 20
    trace: int = 0

    def __post_init__(self):
        horizon = int(self.horizon)
        if horizon < MIN_HORIZON:
            raise SpecError(f"horizon must be at least {MIN_HORIZON} slots, got {horizon}")
        warmup = default_warmup(horizon) if self.warmup is None else int(self.warmup)
        if not (0 <= warmup < horizon):
            raise SpecError(f"warmup {warmup} must lie in [0, horizon)")
        if self.batches < 2:
            raise SpecError("batch means need at least two batches")
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "warmup", warmup)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class Vehicle:
    id: int
    cls: int
    label: str
    arrival_slot: int
    has_comm: bool
    service_start_slot: int
    departure_slot: int

    @property
    def service_time(self) -> int:
        return self.departure_slot - self.service_start_slot + 1

    @property
    def wait(self) -> int:
        return self.service_start_slot - self.arrival_slot - 1


@dataclass(frozen=True)
class SimStats:
    """Post-warmup statistics of one run."""

    model: Model
    seed: int
    horizon: int
    warmup: int
    backend: str
    departures: int
    arrivals: int
    mean_wait: float
    wait_stderr: float
    mean_queue_len: float
    mean_service: float
    mean_service_sq: float
    service_time_histogram: tuple[int, ...]
    per_class_mean_wait: tuple[float, ...]
    per_class_departures: tuple[int, ...]
    max_queue_len: int
    saturated: bool
    epochs: int = 0
    blocked_epochs: int = 0
    idle_epochs: int = 0
    trace: tuple[Vehicle, ...] = field(default=(), repr=False)

    @property
    def blocking_fraction(self) -> float:
        """Share of two-slot phases (Model II) that passed a single vehicle
        because the queue head was stuck behind an empty served lane."""
        return self.blocked_epochs / self.epochs if self.epochs else math.nan

    def service_pmf(self) -> dict[int, float]:
        """Empirical P[x = n]; the last histogram bin collects all longer times."""
        if not self.departures:
            return {}
        return {n: c / self.departures for n, c in enumerate(self.service_time_histogram) if c}


def _cumulative(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    cum = np.cumsum(w) / w.sum()
    # close the last non-empty interval exactly at 1 so rounding never picks
    # a zero-weight trailing class
    last = int(np.flatnonzero(w > 0)[-1])
    cum[last:] = 1.0
    return cum[:-1]


class _Run:
    def __init__(self, cfg: SimConfig, kernel):
        self.cfg = cfg
        self.kernel = kernel
        spec = cfg.spec
        n = spec.model.n_classes
        self.state = np.zeros(_layout.STATE_LEN, dtype=np.int64)
        self.state[_layout.LASTDEP] = -1
        self.state[_layout.PHASE] = -1
        self.acc = np.zeros(_layout.ACC_LEN, dtype=np.int64)
        self.hist = np.zeros(HIST_BINS, dtype=np.int64)
        self.cls_wait = np.zeros(n, dtype=np.int64)
        self.cls_dep = np.zeros(n, dtype=np.int64)
        self.batch_wait = np.zeros(cfg.batches, dtype=np.int64)
        self.batch_dep = np.zeros(cfg.batches, dtype=np.int64)
        self.trace = np.zeros((cfg.trace, _layout.TRACE_COLS), dtype=np.int64)
        cap = 1024
        self.ring_elig = np.zeros(cap, dtype=np.int64)
        self.ring_cls = np.zeros(cap, dtype=np.int8)
        self.ring_comm = np.zeros(cap, dtype=np.int8)
        self.ring_id = np.zeros(cap, dtype=np.int64)

    def _reserve(self, extra: int):
        size = int(self.state[_layout.SIZE])
        cap = self.ring_elig.shape[0]
        if size + extra <= cap:
            return
        new_cap = cap
        while new_cap < size + extra:
            new_cap *= 2
        order = (int(self.state[_layout.HEAD]) + np.arange(size)) % cap
        for name in ("ring_elig", "ring_cls", "ring_comm", "ring_id"):
            old = getattr(self, name)
            new = np.zeros(new_cap, dtype=old.dtype)
            new[:size] = old[order]
            setattr(self, name, new)
        self.state[_layout.HEAD] = 0

    def execute(self) -> None:
        cfg = self.cfg
        spec = cfg.spec
        total = spec.arrivals.total_rate
        class_cum = _cumulative(spec.arrivals.rates) if total > 0 else None
        phase_cum = _cumulative(spec.phases.probs)
        p_t = spec.comm.p_t
        rng = np.random.Generator(np.random.Philox(cfg.seed))
        step = self.kernel.run_model1 if spec.model is Model.I else self.kernel.run_model2
        done = 0
        while done < cfg.horizon:
            c = min(CHUNK, cfg.horizon - done)
            n_arr = rng.poisson(total, c).astype(np.int64)
            v = int(n_arr.sum())
            if v:
                v_cls = np.searchsorted(class_cum, rng.random(v), side="right").astype(np.int8)
                v_comm = (rng.random(v) < p_t).astype(np.int8)
            else:
                v_cls = np.zeros(0, dtype=np.int8)
                v_comm = np.zeros(0, dtype=np.int8)
            phase_idx = np.searchsorted(phase_cum, rng.random(c), side="right").astype(np.int8)
            self._reserve(v)
            step(self.state, self.acc, self.hist, self.cls_wait, self.cls_dep,
                 self.batch_wait, self.batch_dep, self.trace,
                 n_arr, v_cls, v_comm, phase_idx,
                 self.ring_elig, self.ring_cls, self.ring_comm, self.ring_id,
                 cfg.warmup, cfg.horizon)
            done += c
        if spec.model is Model.II and self.state[_layout.STASH]:
            # horizon ended mid-phase: the stashed crossing keeps unit service
            _layout._flush_stash(self.acc, self.hist, self.cls_wait, self.cls_dep,
                                 self.batch_wait, self.batch_dep, self.trace, self.state,
                                 False, cfg.warmup, cfg.horizon)

    def stats(self, backend: str) -> SimStats:
        cfg = self.cfg
        spec = cfg.spec
        L = _layout
        acc = self.acc
        dep = int(acc[L.A_DEP])
        mean_wait = acc[L.A_WAIT] / dep if dep else math.nan
        used = self.batch_dep > 0
        if used.sum() >= 2:
            bm = self.batch_wait[used] / self.batch_dep[used]
            stderr = float(np.std(bm, ddof=1) / math.sqrt(bm.size))
        else:
            stderr = math.nan
        per_cls = tuple(float(w / d) if d else math.nan
                        for w, d in zip(self.cls_wait, self.cls_dep))
        max_q = int(self.state[L.MAXQ])
        labels = spec.arrivals.labels
        trace = tuple(
            Vehicle(int(r[0]), int(r[1]), labels[int(r[1])], int(r[3]), bool(r[2]),
                    int(r[4]), int(r[5]))
            for r in self.trace[: int(self.state[L.TRACE_N])]
        )
        saturated = max_q > saturation_threshold(cfg.horizon, spec.arrivals.total_rate)
        if saturated:
            warnings.warn(
                f"queue reached {max_q} vehicles; run looks saturated and its means are not steady-state",
                RuntimeWarning, stacklevel=3)
        return SimStats(
            model=spec.model,
            seed=cfg.seed,
            horizon=cfg.horizon,
            warmup=cfg.warmup,
            backend=backend,
            departures=dep,
            arrivals=int(acc[L.A_ARRIVALS]),
            mean_wait=float(mean_wait),
            wait_stderr=stderr,
            mean_queue_len=float(acc[L.A_QSUM] / acc[L.A_QSLOTS]) if acc[L.A_QSLOTS] else 0.0,
            mean_service=float(acc[L.A_X] / dep) if dep else math.nan,
            mean_service_sq=float(acc[L.A_X2] / dep) if dep else math.nan,
            service_time_histogram=tuple(int(c) for c in self.hist),
            per_class_mean_wait=per_cls,
            per_class_departures=tuple(int(d) for d in self.cls_dep),
            max_queue_len=max_q,
            saturated=bool(saturated),
            epochs=int(acc[L.A_EPOCHS]),
            blocked_epochs=int(acc[L.A_BLOCKED]),
            idle_epochs=int(acc[L.A_IDLE]),
            trace=trace,
        )


def simulate(cfg: SimConfig, backend: str | None = None) -> SimStats:
    """Run the simulator matching ``cfg.spec.model``."""
    name = backend or _backend.BACKEND
    kernel = _backend.kernel if backend is None else _backend.load(backend)
    run = _Run(cfg, kernel)
    run.execute()
    return run.stats(name)


def simulate_model1(cfg: SimConfig, backend: str | None = None) -> SimStats:
    if cfg.spec.model is not Model.I:
        raise SpecError("simulate_model1 needs a Model I spec")
    return simulate(cfg, backend)


def simulate_model2(cfg: SimConfig, backend: str | None = None) -> SimStats:
    if cfg.spec.model is not Model.II:
        raise SpecError("simulate_model2 needs a Model II spec")
    return simulate(cfg, backend)


def service_time_samples(cfg: SimConfig, backend: str | None = None) -> dict[int, float]:
    """Normalized empirical service-time pmf of one run."""
    return simulate(cfg, backend).service_pmf()


@dataclass(frozen=True)
class SeedAggregate:
    runs: tuple[SimStats, ...]

    def _across(self, attr: str) -> tuple[float, float]:
        vals = np.array([getattr(r, attr) for r in self.runs], dtype=float)
        if vals.size < 2:
            se = self.runs[0].wait_stderr if attr == "mean_wait" else math.nan
            return float(vals.mean()), float(se)
        return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(vals.size))

    @property
    def mean_wait(self) -> float:
        return self._across("mean_wait")[0]

    @property
    def wait_stderr(self) -> float:
        return self._across("mean_wait")[1]

    @property
    def mean_queue_len(self) -> float:
        return self._across("mean_queue_len")[0]

    @property
    def mean_service(self) -> float:
        return self._across("mean_service")[0]

    @property
    def saturated(self) -> bool:
        return any(r.saturated for r in self.runs)

    @property
    def departures(self) -> int:
        return sum(r.departures for r in self.runs)

    def pooled_histogram(self) -> np.ndarray:
        return np.sum([r.service_time_histogram for r in self.runs], axis=0)

    @property
    def blocking_fraction(self) -> float:
        ep = sum(r.epochs for r in self.runs)
        return sum(r.blocked_epochs for r in self.runs) / ep if ep else math.nan


def simulate_seeds(spec: IntersectionSpec, seeds: Iterable[int], horizon: int = 1_000_000,
                   warmup: int | None = None, workers: int = 1,
                   backend: str | None = None) -> SeedAggregate:
    """Independent replications, one per seed, returned in seed order.

    The compiled kernel releases the GIL, so ``workers > 1`` runs seeds in
    parallel threads.
    """
    cfgs = [SimConfig(spec, horizon=horizon, warmup=warmup, seed=s) for s in seeds]
    if not cfgs:
        raise SpecError("at least one seed is required")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = tuple(pool.map(lambda c: simulate(c, backend), cfgs))
    else:
        runs = tuple(simulate(c, backend) for c in cfgs)
    return SeedAggregate(runs)
