"""Certified enclosures for coefficient bounds of univalent functions."""

from .catalog import BoundProblem, DomainSpec, all_problems, catalog, f6_edge_curves, get_problem
from .interval import DomainError, Interval
from .optimizer import Enclosure, OptimizerConfig, maximize, stationary_residual_f6, verify_bound

__version__ = "0.1.0"

__all__ = [
    "BoundProblem",
    "DomainError",
    "DomainSpec",
    "Enclosure",
    "Interval",
    "OptimizerConfig",
    "all_problems",
    "catalog",
    "f6_edge_curves",
    "get_problem",
    "maximize",
    "stationary_residual_f6",
    "verify_bound",
]
