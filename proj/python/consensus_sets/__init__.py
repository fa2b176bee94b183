"""Confidence sets for expected-utility rankings of two samples over CRRA utility grids."""

from ._core import (
    ConfigError,
    DomainError,
    QuadratureError,
    ShapeError,
    analyze,
    bootstrap_draws,
    build_axis,
    eval_utility,
    simulate,
    true_eu,
    true_theta_set,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "QuadratureError",
    "ShapeError",
    "analyze",
    "bootstrap_draws",
    "build_axis",
    "eval_utility",
    "simulate",
    "true_eu",
    "true_theta_set",
]
