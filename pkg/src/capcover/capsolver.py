"""Fixed-guess capacitated pipeline.

For a guess ``t_star`` and a set of vertices to cover (all edges of the
graph already ``<= t_star``):

1. ``phase_a``: greedily grow cheap ``ceil(lam/4)``-terminal Steiner trees;
   whatever is left is the bad set.
2. ``iter_refine`` / ``absorb_and_pad``: match bad trees to good trees,
   re-clustering Hall sets with the uncapacitated subroutine, then glue
   matched pairs and pad the unmatched ones with dummies.
3. ``hamiltonian_order`` / ``merge_big`` / ``split_exact``: walk the trees
   along a Hamiltonian path of the cube of their adjacency graph, merge runs
   of ``c`` trees and cut the result into trees covering exactly ``lam``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil
from typing import Optional, Sequence

import numpy as np

from .graph import (
    TOL,
    MetricClosure,
    WeightedGraph,
    expand_tree,
    join_trees,
    leq,
    set_distances,
    tree_distance,
    trim_tree,
    trivial_tree,
)
from .matching import BipartiteInstance, MatchingOutcome, max_matching
from .mmtc import PromiseViolated, metric_request, solve_mmtc
from .model import CoverTree, GuessTooSmall, InvariantError, RunRecord, SolverConfig, Trace
from .steiner import SteinerRequest, approx_q_steiner

log = logging.getLogger(__name__)


class Disconnected(GuessTooSmall):
    pass


class NotDivisible(ValueError):
    pass


@dataclass
class PhaseAOutput:
    lambda_good: list
    v_bad: list


@dataclass
class RefineState:
    bad: list  # CoverTrees over V_bad
    good: list  # the lambda-good trees (fixed side of the matching)
    t: int = 0
    sizes: list = field(default_factory=list)  # |B_t| after every step


def phase_a(graph: WeightedGraph, mc: MetricClosure, cover_set: Sequence[int], lam: int, t_star: float,
            cfg: SolverConfig) -> PhaseAOutput:
    q = ceil(lam / 4)
    limit = cfg.gamma_s * t_star
    uncovered = set(cover_set)
    pending = set(cover_set)
    good = []
    for v in sorted(cover_set):
        if v not in pending:
            continue
        res = approx_q_steiner(SteinerRequest(graph, mc, frozenset(uncovered), q, v), cfg.steiner_budget)
        if res is not None and leq(res.cost, limit):
            good.append(CoverTree(res.tree, res.spanned_terminals))
            uncovered -= res.spanned_terminals
            pending -= res.spanned_terminals
        else:
            pending.discard(v)
    return PhaseAOutput(good, sorted(uncovered))


def build_bipartite(state: RefineState, mc: MetricClosure, t_star: float) -> BipartiteInstance:
    if not state.bad:
        return BipartiteInstance(0, len(state.good), ())
    if not state.good:
        return BipartiteInstance(len(state.bad), 0, tuple(() for _ in state.bad))
    d = set_distances([b.tree for b in state.bad], [g.tree for g in state.good], mc)
    adj = [np.flatnonzero(row <= t_star + TOL).tolist() for row in d]
    return BipartiteInstance.from_lists(len(state.good), adj)


def iter_refine(state: RefineState, graph: WeightedGraph, mc: MetricClosure, t_star: float,
                cfg: SolverConfig) -> tuple[RefineState, MatchingOutcome]:
    cap = 2 * cfg.beta * t_star
    state.sizes = [len(state.bad)]
    while True:
        outcome = max_matching(build_bipartite(state, mc, t_star))
        if outcome.deficiency == 0:
            return state, outcome
        hall = outcome.hall_set
        s = len(hall)
        if s < 2:
            return state, outcome
        verts = sorted(set().union(*(state.bad[i].cover for i in hall)))
        try:
            res = solve_mmtc(metric_request(mc.dist, verts, s - 1, 2 * t_star))
        except PromiseViolated:
            return state, outcome
        new = []
        for ct in res.trees:
            tree = expand_tree(graph, mc, ct.tree)
            if not leq(tree.cost, cap):
                return state, outcome
            new.append(CoverTree(tree, ct.cover))
        keep = [b for i, b in enumerate(state.bad) if i not in set(hall)]
        state.bad = keep + new
        state.t += 1
        state.sizes.append(len(state.bad))


def absorb_and_pad(state: RefineState, outcome: MatchingOutcome, lam: int, t_star: float,
                   graph: WeightedGraph, mc: MetricClosure) -> list:
    by_good = {q: b for b, q in outcome.matching}
    out = []
    for j, g in enumerate(state.good):
        b = by_good.get(j)
        if b is None:
            out.append(g)
            continue
        bad = state.bad[b]
        _, link = tree_distance(g.tree, bad.tree, mc)
        tree = join_trees(graph, mc, [g.tree, bad.tree], [link])
        out.append(CoverTree(tree, g.cover | bad.cover, g.dummy_count + bad.dummy_count))
    pad = ceil(lam / 2)
    for b in outcome.unmatched_left:
        bad = state.bad[b]
        out.append(CoverTree(bad.tree, bad.cover, bad.dummy_count + pad))
    return out


def pad_to_multiple(trees: list, lam: int) -> list:
    if not trees:
        return []
    extra = -sum(t.size for t in trees) % lam
    if not extra:
        return list(trees)
    head = trees[0]
    return [CoverTree(head.tree, head.cover, head.dummy_count + extra, head.root)] + list(trees[1:])


def cube_walk(adj: Sequence[Sequence[int]], start: int = 0) -> list[int]:
    """Hamiltonian path of the cube of a connected graph.

    Takes a BFS spanning tree and lists even-depth nodes on the way down and
    odd-depth nodes on the way up; consecutive nodes are then at most three
    tree hops apart. Raises :class:`Disconnected` if ``adj`` is not connected.
    """
    n = len(adj)
    if n == 0:
        return []
    children = [[] for _ in range(n)]
    seen = [False] * n
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sorted(adj[u]):
                if not seen[v]:
                    seen[v] = True
                    children[u].append(v)
                    nxt.append(v)
        frontier = nxt
    if not all(seen):
        raise Disconnected(f"adjacency graph has unreachable nodes ({seen.count(False)} of {n})")
    out = []
    stack = [(start, 0, False)]
    while stack:
        u, depth, done = stack.pop()
        if done:
            out.append(u)
            continue
        if depth % 2 == 0:
            out.append(u)
        else:
            stack.append((u, depth, True))
        for v in reversed(children[u]):
            stack.append((v, depth + 1, False))
    return out


def tree_adjacency(trees: Sequence[CoverTree], mc: MetricClosure, t_star: float) -> list[list[int]]:
    d = set_distances([t.tree for t in trees], [t.tree for t in trees], mc)
    close = d <= t_star + TOL
    return [[j for j in np.flatnonzero(close[i]).tolist() if j != i] for i in range(len(trees))]


def hamiltonian_order(trees: Sequence[CoverTree], mc: MetricClosure, t_star: float) -> list:
    if len(trees) <= 1:
        return list(trees)
    order = cube_walk(tree_adjacency(trees, mc, t_star))
    return [trees[i] for i in order]


def merge_big(trees: Sequence[CoverTree], lam: int, c: int, graph: WeightedGraph, mc: MetricClosure) -> list:
    """Join consecutive runs of ``c`` trees (the last run may be shorter)."""
    out = []
    for i in range(0, len(trees), c):
        run = trees[i : i + c]
        if len(run) == 1:
            out.append(run[0])
            continue
        tree = join_trees(graph, mc, [t.tree for t in run])
        cover = frozenset().union(*(t.cover for t in run))
        out.append(CoverTree(tree, cover, sum(t.dummy_count for t in run)))
    return out


def _take(real: list, dummies: int, count: int):
    r = real[:count]
    d = min(dummies, count - len(r))
    return r, d, real[len(r):], dummies - d


def split_exact(trees: Sequence[CoverTree], lam: int, graph: WeightedGraph, mc: MetricClosure) -> list:
    """Cut a chain of trees into trees covering exactly ``lam`` each.

    The head tree's cover is handed out ``lam`` at a time (ascending ids,
    dummies last) reusing the head's own structure; a remainder ``p`` is
    topped up with ``lam - p`` items from the next tree through a bridge tree,
    and the next tree becomes the new head.
    """
    total = sum(t.size for t in trees)
    if total % lam:
        raise NotDivisible(f"total cover {total} is not a multiple of {lam}")
    out = []
    if not trees:
        return out
    head = trees[0].tree
    real, dummies = sorted(trees[0].cover), trees[0].dummy_count
    i = 0
    while True:
        while len(real) + dummies >= lam:
            r, d, real, dummies = _take(real, dummies, lam)
            out.append(CoverTree(head, frozenset(r), d))
        p = len(real) + dummies
        i += 1
        if i == len(trees):
            if p:
                raise NotDivisible("leftover cover at the end of the chain")
            return out
        nxt = trees[i]
        n_real, n_dummies = sorted(nxt.cover), nxt.dummy_count
        if p:
            if len(n_real) + n_dummies < lam - p:
                raise ValueError("next tree is too small to complete the bridge")
            r, d, n_real, n_dummies = _take(n_real, n_dummies, lam - p)
            bridge = join_trees(graph, mc, [head, nxt.tree])
            out.append(CoverTree(bridge, frozenset(real) | frozenset(r), dummies + d))
        head, real, dummies = nxt.tree, n_real, n_dummies


def strip_dummies(trees: Sequence[CoverTree]) -> list:
    return [CoverTree(t.tree, t.cover, 0, t.root) for t in trees if t.cover]


def _check(cond: bool, msg: str):
    if not cond:
        raise InvariantError(msg)


def solve_component(graph: WeightedGraph, mc: MetricClosure, cover_set: Sequence[int], lam: int,
                    t_star: float, cfg: SolverConfig, trace: Optional[Trace] = None) -> list:
    """Run the three stages on one ``t_star``-linked vertex set.

    Returns trees covering ``cover_set`` with at most ``lam`` vertices each
    and cost at most ``cfg.bound * t_star``. Raises :class:`GuessTooSmall`
    when the trees cannot be chained, which only happens for a wrong guess.
    """
    cover_set = sorted(cover_set)
    if not cover_set:
        return []
    q = ceil(lam / 4)
    rec = RunRecord(t_star=t_star, lam=lam, q=q, n_cover=len(cover_set))
    if trace is not None:
        trace.runs.append(rec)

    pa = phase_a(graph, mc, cover_set, lam, t_star, cfg)
    rec.good_sizes = [len(t.cover) for t in pa.lambda_good]
    rec.good_costs = [t.cost for t in pa.lambda_good]
    covered = [v for t in pa.lambda_good for v in t.cover]
    rec.partition_ok = (len(covered) == len(set(covered))
                        and set(covered).isdisjoint(pa.v_bad)
                        and set(covered) | set(pa.v_bad) == set(cover_set))
    _check(rec.partition_ok, "good covers and bad set do not partition the vertex set")
    _check(all(s == q for s in rec.good_sizes), "good tree with wrong cover size")
    _check(all(leq(c, cfg.gamma_s * t_star) for c in rec.good_costs), "good tree over the Steiner threshold")
    rec.v_bad = len(pa.v_bad)

    state = RefineState([CoverTree(trivial_tree(v), frozenset([v])) for v in pa.v_bad], pa.lambda_good)
    state, outcome = iter_refine(state, graph, mc, t_star, cfg)
    rec.refinements = state.t
    rec.shrink_ok = all(b < a for a, b in zip(state.sizes, state.sizes[1:])) and state.t <= rec.v_bad
    _check(rec.shrink_ok, "refinement did not shrink the bad side")

    trees = absorb_and_pad(state, outcome, lam, t_star, graph, mc)
    alpha_cap = cfg.alpha * t_star
    _check(all(t.size >= q and leq(t.cost, alpha_cap) for t in trees), "absorbed tree violates size/cost bounds")
    trees = pad_to_multiple(trees, lam)
    log.debug("t*=%g: %d good, %d bad, %d refinements, %d trees before chaining",
              t_star, len(pa.lambda_good), len(pa.v_bad), state.t, len(trees))

    ordered = hamiltonian_order(trees, mc, t_star)
    merged = merge_big(ordered, lam, cfg.c, graph, mc)
    if merged and merged[-1].size < lam:
        merged.reverse()
    exact = split_exact(merged, lam, graph, mc)
    _check(all(t.size == lam for t in exact), "split produced a tree not covering exactly lambda")
    final = []
    for t in strip_dummies(exact):
        final.append(CoverTree(trim_tree(graph, t.tree, t.cover), t.cover))
    cap = cfg.bound * t_star
    _check(all(leq(t.cost, cap) for t in final), "output tree exceeds the fixed-guess bound")
    return final
