"""Slot-level intersection simulator (Model I and Model II)."""

from ._backend import BACKEND, available as available_backends
from .engine import (
    SeedAggregate,
    SimConfig,
    SimStats,
    Vehicle,
    default_warmup,
    saturation_threshold,
    service_time_samples,
    simulate,
    simulate_model1,
    simulate_model2,
    simulate_seeds,
)

__all__ = [
    "BACKEND",
    "available_backends",
    "SeedAggregate",
    "SimConfig",
    "SimStats",
    "Vehicle",
    "default_warmup",
    "saturation_threshold",
    "service_time_samples",
    "simulate",
    "simulate_model1",
    "simulate_model2",
    "simulate_seeds",
]
