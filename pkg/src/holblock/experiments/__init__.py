"""Config ingestion, sweeps and result emission behind the ``holblock`` CLI."""

from .config import (
    ConfigError,
    ExperimentSpec,
    SchemaViolation,
    SemanticViolation,
    SweepSpec,
    dump_network,
    load_config,
    parse_config,
)
from .emit import emit_results, load_results
from .sweep import ResultRow, RouteRow, run_sweep

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "SchemaViolation",
    "SemanticViolation",
    "SweepSpec",
    "dump_network",
    "load_config",
    "parse_config",
    "emit_results",
    "load_results",
    "ResultRow",
    "RouteRow",
    "run_sweep",
]
