"""Intersection waiting times under head-of-line blocking, with shortest-delay routing."""

from .analytics import (
    ArrivalSpec,
    CommProfile,
    IntersectionSpec,
    InvalidMoments,
    Model,
    PhaseConfig,
    SpecError,
    WaitingTimeReport,
    model1_moments,
    model1_service_pmf,
    model1_service_tail,
    model1_waiting_time,
    model2_blocking_probability,
    model2_moments,
    model2_service_pmf,
    model2_waiting_time,
    pk_waiting_time,
    moments,
    waiting_time,
)

__version__ = "0.1.0"
