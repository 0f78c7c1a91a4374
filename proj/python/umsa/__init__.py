"""Unbiased maximum marginal likelihood estimation (C++ core)."""

from ._umsa import (
    ConfigError,
    DomainError,
    Experiment,
    RunError,
    forward_convergence,
    loglog_slope,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Experiment",
    "RunError",
    "forward_convergence",
    "loglog_slope",
]
