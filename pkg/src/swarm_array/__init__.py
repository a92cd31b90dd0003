"""Distributed sorting of a robot swarm into a straight, label-ordered array."""

from .model import PhysicalParams, Scenario, default_params, generate_scenario, target_positions
from .pipeline import RunResult, run_pipeline

__all__ = [
    "PhysicalParams",
    "RunResult",
    "Scenario",
    "default_params",
    "generate_scenario",
    "run_pipeline",
    "target_positions",
]
