"""Graph search guided by noisy distance-to-goal predictions."""

from .exploration import (
    SearchInstance,
    SearchTrace,
    run_astar_order,
    run_beta_weighted,
    run_greedy,
    run_pruned_known_eps,
    run_smallest_prediction,
)
from .graph import DistanceMatrix, Graph
from .planning import run_full_info
from .predictions import error_profile

__all__ = [
    "DistanceMatrix",
    "Graph",
    "SearchInstance",
    "SearchTrace",
    "error_profile",
    "run_astar_order",
    "run_beta_weighted",
    "run_full_info",
    "run_greedy",
    "run_pruned_known_eps",
    "run_smallest_prediction",
]
