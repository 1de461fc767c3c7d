"""Collaborative safety filters for mass-spring formations."""

from ._core import (
    ConfigError,
    ContractError,
    Polytope,
    SolverError,
    clearance,
    closest_points,
    contains,
    intersect,
    is_empty,
    max_min_capability,
    preset_names,
    project,
    report,
    run,
    split_deficit,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "Polytope",
    "SolverError",
    "clearance",
    "closest_points",
    "contains",
    "intersect",
    "is_empty",
    "max_min_capability",
    "preset_names",
    "project",
    "report",
    "run",
    "split_deficit",
]
