"""Closed-form waiting times for single-approach intersections with HoL blocking.

Two queue layouts are supported:

* Model I: one FIFO lane, three turn classes (left, straight, right) and
  three traffic phases.  A HoL vehicle that does not announce its turn is
  served only when the randomly selected phase matches its direction.
* Model II: two dedicated HoL lanes (straight-or-right, left) fed by one
  FIFO, phases held for two slots, with lane sensing.

Every function here is pure; all times are in slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

__all__ = [
    "SpecError",
    "InvalidMoments",
    "Model",
    "ArrivalSpec",
    "PhaseConfig",
    "CommProfile",
    "IntersectionSpec",
    "WaitingTimeReport",
    "pk_waiting_time",
    "model1_service_pmf",
    "model1_service_tail",
    "model1_moments",
    "model1_waiting_time",
    "model2_blocking_probability",
    "model2_service_pmf",
    "model2_moments",
    "model2_waiting_time",
    "waiting_time",
]

PROB_TOL = 1e-9

MODEL1_LABELS = ("left", "straight", "right")
MODEL2_LABELS = ("straight", "left")


class SpecError(ValueError):
    """Invalid intersection parameters."""


class InvalidMoments(ValueError):
    """Service-time moments that no distribution on {1, 2, ...} can have."""


class Model(str, Enum):
    I = "I"
    II = "II"

    @property
    def n_classes(self) -> int:
        return 3 if self is Model.I else 2

    @property
    def labels(self) -> tuple[str, ...]:
        return MODEL1_LABELS if self is Model.I else MODEL2_LABELS

    @classmethod
    def parse(cls, value) -> "Model":
        if isinstance(value, Model):
            return value
        key = str(value).strip().upper()
        aliases = {"1": "I", "2": "II", "MODEL1": "I", "MODEL2": "II",
                   "MODEL I": "I", "MODEL II": "II"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise SpecError(f"unknown model kind {value!r}") from None


def _finite_nonneg(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise SpecError(f"{what} must be a finite non-negative number, got {x!r}")
    return x


@dataclass(frozen=True)
class ArrivalSpec:
    """Per-class Poisson arrival rates in vehicles per slot.

    Model I orders the classes (left, straight, right); Model II orders them
    (straight-or-right, left).  Use :meth:`merged` to fold a three-direction
    spec into the Model II layout.
    """

    rates: tuple[float, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        rates = tuple(_finite_nonneg(r, "arrival rate") for r in self.rates)
        if not rates:
            raise SpecError("at least one arrival class is required")
        labels = tuple(self.labels) or tuple(f"class{i}" for i in range(len(rates)))
        if len(labels) != len(rates):
            raise SpecError("labels and rates differ in length")
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def model1(cls, left: float, straight: float, right: float) -> "ArrivalSpec":
        return cls((left, straight, right), MODEL1_LABELS)

    @classmethod
    def model2(cls, straight_or_right: float, left: float) -> "ArrivalSpec":
        return cls((straight_or_right, left), MODEL2_LABELS)

    @classmethod
    def merged(cls, left: float, straight: float, right: float) -> "ArrivalSpec":
        """Model II arrivals from per-direction rates: straight and right share a lane."""
        return cls.model2(straight + right, left)

    @property
    def total_rate(self) -> float:
        return math.fsum(self.rates)

    @property
    def fractions(self) -> tuple[float, ...]:
        """Turning fractions, the share of each class in the arrival stream."""
        total = self.total_rate
        if total <= 0:
            raise SpecError("turning fractions need a positive total arrival rate")
        return tuple(r / total for r in self.rates)

    def __len__(self) -> int:
        return len(self.rates)


@dataclass(frozen=True)
class PhaseConfig:
    """Selection probability of each traffic phase, i.i.d. per decision."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise SpecError("phase block: at least one phase is required")
        for i, p in enumerate(probs):
            if not (0.0 < p <= 1.0) or not math.isfinite(p):
                raise SpecError(f"phase block: p[{i}]={p!r} must lie in (0, 1]")
        total = math.fsum(probs)
        if abs(total - 1.0) > PROB_TOL:
            raise SpecError(f"phase block: probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, n: int) -> "PhaseConfig":
        return cls(tuple(1.0 / n for _ in range(n)))

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class CommProfile:
    """Probability that a vehicle announces its intended turn."""

    p_t: float

    def __post_init__(self):
        p = float(self.p_t)
        if not (0.0 <= p <= 1.0):
            raise SpecError(f"communication probability {p!r} outside [0, 1]")
        object.__setattr__(self, "p_t", p)


@dataclass(frozen=True)
class IntersectionSpec:
    model: Model
    arrivals: ArrivalSpec
    phases: PhaseConfig
    comm: CommProfile

    def __post_init__(self):
        model = Model.parse(self.model)
        object.__setattr__(self, "model", model)
        n = model.n_classes
        if len(self.arrivals) != n:
            raise SpecError(f"Model {model.value} needs {n} arrival classes, got {len(self.arrivals)}")
        if len(self.phases) != n:
            raise SpecError(f"phase block: Model {model.value} needs {n} phases, got {len(self.phases)}")

    @classmethod
    def build(cls, model, rates: Sequence[float], probs: Sequence[float], p_t: float) -> "IntersectionSpec":
        model = Model.parse(model)
        return cls(model, ArrivalSpec(tuple(rates), model.labels),
                   PhaseConfig(tuple(probs)), CommProfile(p_t))

    def with_comm(self, p_t: float) -> "IntersectionSpec":
        return IntersectionSpec(self.model, self.arrivals, self.phases, CommProfile(p_t))

    def with_rates(self, rates: Sequence[float]) -> "IntersectionSpec":
        return IntersectionSpec(self.model, ArrivalSpec(tuple(rates), self.arrivals.labels),
                                self.phases, self.comm)


@dataclass(frozen=True)
class WaitingTimeReport:
    """Pollaczek-Khinchine result.  ``W`` is ``inf`` when the queue is unstable."""

    E_x: float
    E_x2: float
    rho: float
    W: float
    stable: bool
    total_rate: float = 0.0


def pk_waiting_time(total_rate: float, E_x: float, E_x2: float) -> WaitingTimeReport:
    """Mean queueing delay (arrival to start of service) of an M/G/1 queue.

    An overloaded queue (``rho >= 1``) is reported with ``stable=False`` and
    ``W = inf`` rather than raising.
    """
    total_rate = _finite_nonneg(total_rate, "total arrival rate")
    E_x, E_x2 = float(E_x), float(E_x2)
    if not (math.isfinite(E_x) and math.isfinite(E_x2)):
        raise InvalidMoments(f"moments must be finite, got E(x)={E_x}, E(x^2)={E_x2}")
    if E_x < 1.0 - PROB_TOL:
        raise InvalidMoments(f"service time is at least one slot, got E(x)={E_x}")
    if E_x2 < E_x * E_x * (1.0 - 1e-12):
        raise InvalidMoments(f"E(x^2)={E_x2} < E(x)^2={E_x * E_x}")
    rho = total_rate * E_x
    if rho >= 1.0:
        return WaitingTimeReport(E_x, E_x2, rho, math.inf, False, total_rate)
    W = total_rate * E_x2 / (2.0 * (1.0 - rho))
    return WaitingTimeReport(E_x, E_x2, rho, W, True, total_rate)


def _active_classes(arr: ArrivalSpec, ph: PhaseConfig):
    """(fraction, phase prob) pairs for classes with non-zero traffic."""
    return [(a, p) for a, p in zip(arr.fractions, ph.probs) if a > 0.0]


def model1_service_pmf(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile, n: int) -> float:
    """P[x = n] for Model I."""
    if n < 1 or int(n) != n:
        raise SpecError(f"service time is a positive integer, got {n!r}")
    n = int(n)
    pt = comm.p_t
    terms = _active_classes(arr, ph)
    if n == 1:
        return pt + (1.0 - pt) * math.fsum(a * p for a, p in terms)
    return (1.0 - pt) * math.fsum(a * (1.0 - p) ** (n - 1) * p for a, p in terms)


def model1_service_tail(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile, n: int) -> float:
    """P[x >= n] for Model I, summed in closed form."""
    if n <= 1:
        return 1.0
    return (1.0 - comm.p_t) * math.fsum(a * (1.0 - p) ** (n - 1) for a, p in _active_classes(arr, ph))


def model1_moments(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile) -> tuple[float, float]:
    # a communicating HoL vehicle leaves in one slot; otherwise its service is
    # geometric with the matching phase probability
    pt = comm.p_t
    terms = _active_classes(arr, ph)
    E_x = pt + (1.0 - pt) * math.fsum(a / p for a, p in terms)
    E_x2 = pt + (1.0 - pt) * math.fsum(a * (2.0 - p) / (p * p) for a, p in terms)
    return E_x, E_x2


def _empty_report() -> WaitingTimeReport:
    return WaitingTimeReport(1.0, 1.0, 0.0, 0.0, True, 0.0)


def model1_waiting_time(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile) -> WaitingTimeReport:
    if arr.total_rate == 0.0:
        return _empty_report()
    E_x, E_x2 = model1_moments(arr, ph, comm)
    return pk_waiting_time(arr.total_rate, E_x, E_x2)


def model2_blocking_probability(arr: ArrivalSpec, ph: PhaseConfig) -> float:
    """Stationary probability that a two-slot phase passes only one vehicle.

    Zero when either lane carries no traffic.
    """
    if len(arr) != 2 or len(ph) != 2:
        raise SpecError("Model II needs two arrival classes and two phases")
    l1, l2 = arr.rates
    p1, p2 = ph.probs
    if l1 == 0.0 or l2 == 0.0:
        return 0.0
    # the ratio is scale-free in the rates; work with lane fractions so tiny
    # rates cannot underflow
    total = l1 + l2
    r, s = l1 / total, l2 / total
    num = 2.0 * r * s * (r * p2 + s * p1)
    den = r * r * p2 + s * s * p1 + 4.0 * r * s
    return num / den


def model2_service_pmf(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile, n: int) -> float:
    if n < 1 or int(n) != n:
        raise SpecError(f"service time is a positive integer, got {n!r}")
    b = (1.0 - comm.p_t) * model2_blocking_probability(arr, ph)
    return {1: 1.0 - b, 2: b}.get(int(n), 0.0)


def model2_moments(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile) -> tuple[float, float]:
    # x is 1 or 2, so E(x^2) = 1 + 3 P[x=2]
    b = (1.0 - comm.p_t) * model2_blocking_probability(arr, ph)
    return 1.0 + b, 1.0 + 3.0 * b


def model2_waiting_time(arr: ArrivalSpec, ph: PhaseConfig, comm: CommProfile) -> WaitingTimeReport:
    if arr.total_rate == 0.0:
        return _empty_report()
    E_x, E_x2 = model2_moments(arr, ph, comm)
    return pk_waiting_time(arr.total_rate, E_x, E_x2)


def waiting_time(spec: IntersectionSpec) -> WaitingTimeReport:
    fn = model1_waiting_time if spec.model is Model.I else model2_waiting_time
    return fn(spec.arrivals, spec.phases, spec.comm)


def moments(spec: IntersectionSpec) -> tuple[float, float]:
    fn = model1_moments if spec.model is Model.I else model2_moments
    if spec.arrivals.total_rate == 0.0:
        return 1.0, 1.0
    return fn(spec.arrivals, spec.phases, spec.comm)
