"""Capacitated min-max tree cover: approximation pipeline, exact oracle and
feasibility checker."""
from .graph import MetricClosure, Tree, WeightedGraph, components, prune_edges, shortest_paths, tree_distance
from .model import CoverTree, GuessTooSmall, Infeasible, Instance, Solution, SolverConfig, Trace
from .oracle import exact_caprmmtc, exact_capmmtc, exact_mmtc
from .rooted import search_solve_rooted
from .search import search_solve
from .verify import check_solution

__all__ = [
    "CoverTree",
    "GuessTooSmall",
    "Infeasible",
    "Instance",
    "MetricClosure",
    "Solution",
    "SolverConfig",
    "Trace",
    "Tree",
    "WeightedGraph",
    "check_solution",
    "components",
    "exact_caprmmtc",
    "exact_capmmtc",
    "exact_mmtc",
    "prune_edges",
    "search_solve",
    "search_solve_rooted",
    "shortest_paths",
    "tree_distance",
]
