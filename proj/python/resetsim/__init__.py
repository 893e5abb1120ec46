"""Dissipator-based qubit reset simulations (C++ core)."""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    NonThermalError,
    NotFoundError,
    SingularNetworkError,
    StepSizeError,
    UsageError,
    ZeroLossError,
    benchmark,
    diplexer_isolation_db,
    dissipator_s21,
    effective_temperature,
    fringe_linecut,
    parse_quantity,
    purcell_decay_rate,
    run_cli,
    thermal_population,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "NonThermalError",
    "NotFoundError",
    "SingularNetworkError",
    "StepSizeError",
    "UsageError",
    "ZeroLossError",
    "benchmark",
    "diplexer_isolation_db",
    "dissipator_s21",
    "effective_temperature",
    "fringe_linecut",
    "parse_quantity",
    "purcell_decay_rate",
    "run_cli",
    "thermal_population",
]
