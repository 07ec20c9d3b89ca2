"""Rooted variant: every output tree must contain its own distinct root.

Per component, the non-root vertices are covered with capacity ``lam - 1``
by the unrooted pipeline; trees are then matched to roots within ``t_star``.
While some set ``S`` of trees has fewer reachable roots than members, the
vertices of ``S`` are re-covered at guess ``4 * t_star`` with at most
``|N(S)|`` trees. Matched roots are wired in and join their tree's cover;
idle roots become singleton trees.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .capsolver import _check, solve_component
from .graph import (
    TOL,
    MetricClosure,
    WeightedGraph,
    components,
    join_trees,
    leq,
    linkage_clusters,
    prune_edges,
    shortest_paths,
    trim_tree,
    trivial_tree,
)
from .matching import BipartiteInstance, max_matching
from .model import CoverTree, GuessTooSmall, Infeasible, Instance, Solution, SolverConfig, Trace
from .search import bracket_search


class _Guess:
    """Pruned graphs and closures for one guess, built on demand."""

    def __init__(self, graph: WeightedGraph, t_star: float):
        self.graph = graph
        self.t_star = t_star
        self._cache: dict = {}

    def at(self, scale: float):
        if scale not in self._cache:
            pruned = prune_edges(self.graph, scale * self.t_star)
            self._cache[scale] = (pruned, shortest_paths(pruned))
        return self._cache[scale]


def cover_vertices(graph: WeightedGraph, pruned: WeightedGraph, mc: MetricClosure, vertices, lam: int,
                   t_star: float, cfg: SolverConfig, trace: Optional[Trace] = None) -> list:
    """Unrooted pipeline on an arbitrary vertex subset: split it into
    components of ``pruned`` and ``t_star``-linked clusters, solve each."""
    wanted = set(vertices)
    out = []
    for comp in components(pruned):
        part = [v for v in comp if v in wanted]
        for cluster in linkage_clusters(part, mc, t_star):
            out.extend(solve_component(graph, mc, cluster, lam, t_star, cfg, trace))
    return out


def _root_bipartite(trees: list, roots: list, mc: MetricClosure, t_star: float) -> BipartiteInstance:
    adj = []
    for t in trees:
        d = mc.dist[np.ix_(sorted(t.tree.vertices), roots)].min(axis=0)
        adj.append(np.flatnonzero(d <= t_star + TOL).tolist())
    return BipartiteInstance.from_lists(len(roots), adj)


def solve_rooted_component(graph: WeightedGraph, guess: _Guess, comp: list, roots: list, lam: int,
                           cfg: SolverConfig, trace: Optional[Trace] = None) -> list:
    t_star = guess.t_star
    pruned, mc = guess.at(1)
    rootset = set(roots)
    rest = [v for v in comp if v not in rootset]
    if rest and lam < 2:
        raise GuessTooSmall("capacity 1 leaves no room beside the root")
    trees = cover_vertices(graph, pruned, mc, rest, lam - 1, t_star, cfg, trace)
    while True:
        outcome = max_matching(_root_bipartite(trees, roots, mc, t_star))
        if outcome.deficiency == 0:
            break
        hall = set(outcome.hall_set)
        budget = len(_root_bipartite([trees[i] for i in hall], roots, mc, t_star).neighbourhood(range(len(hall))))
        if budget == 0:
            raise GuessTooSmall("a tree has no root within reach")
        verts = set().union(*(trees[i].cover for i in hall))
        pruned4, mc4 = guess.at(4)
        new = cover_vertices(graph, pruned4, mc4, verts, lam - 1, 4 * t_star, cfg, trace)
        if len(new) > budget:
            raise GuessTooSmall(f"reclustering needs {len(new)} trees for {budget} roots")
        trees = [t for i, t in enumerate(trees) if i not in hall] + new
    out = []
    used = set()
    for b, j in outcome.matching:
        r = roots[j]
        t = trees[b]
        vs = sorted(t.tree.vertices)
        u = vs[int(np.argmin(mc.dist[vs, r]))]
        tree = join_trees(graph, mc, [t.tree, trivial_tree(r)], [(u, r)])
        cover = t.cover | {r}
        out.append(CoverTree(trim_tree(graph, tree, cover), cover, 0, r))
        used.add(r)
    for r in roots:
        if r not in used:
            out.append(CoverTree(trivial_tree(r), frozenset([r]), 0, r))
    cap = cfg.rooted_bound * t_star
    _check(all(leq(t.cost, cap) for t in out), "rooted tree exceeds the rooted bound")
    _check(all(t.size <= lam for t in out), "rooted tree over capacity")
    return out


def solve_guess_rooted(inst: Instance, t_star: float, cfg: SolverConfig, trace: Optional[Trace] = None) -> list:
    guess = _Guess(inst.graph, t_star)
    pruned, _ = guess.at(1)
    rootset = set(inst.roots)
    out = []
    for comp in components(pruned):
        roots = [v for v in comp if v in rootset]
        if not roots:
            raise GuessTooSmall(f"component starting at {comp[0]} has no root")
        out.extend(solve_rooted_component(inst.graph, guess, comp, roots, inst.lam, cfg, trace))
    return out


def search_solve_rooted(inst: Instance, cfg: SolverConfig = SolverConfig(), trace: Optional[Trace] = None) -> Solution:
    if not inst.rooted:
        raise ValueError("instance has no roots")
    if inst.k * inst.lam < inst.n or (inst.lam == 1 and inst.n > inst.k):
        raise Infeasible(f"k*lambda = {inst.k * inst.lam} cannot cover n = {inst.n} with distinct roots")
    trace = trace if trace is not None else Trace()
    trees, t_star, guesses = bracket_search(inst, cfg, lambda t: solve_guess_rooted(inst, t, cfg, trace), trace)
    trees = sorted(trees, key=lambda t: t.root)
    span = max((t.cost for t in trees), default=0.0)
    refinements = sum(r.refinements for r in trace.runs if r.t_star in (t_star, 4 * t_star))
    return Solution(trees, span, t_star, True, cfg, refinements, guesses)
