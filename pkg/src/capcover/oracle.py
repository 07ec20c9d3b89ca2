"""Brute-force optimum for tiny instances.

Every partition of V into at most k parts (restricted-growth strings) is
priced with exact Steiner costs from a single subset table; partial parts
give a lower bound because adding terminals never makes a Steiner tree
cheaper.
"""
from __future__ import annotations

from itertools import permutations
from typing import Optional

from .graph import INF, TOL, WeightedGraph, shortest_paths
from .model import CoverTree, Instance, Solution, SolverConfig
from .steiner import subset_costs, subset_tree

MAX_N = 9
MAX_K = 9  # k beyond n adds nothing; Bell(9) partitions are cheap
MAX_N_ROOTED = 8
MAX_K_ROOTED = 3


class TooLarge(ValueError):
    pass


class NoRootAssignment(ValueError):
    pass


def _partitions(n: int, k: int, cap: Optional[int], cost, score):
    """List of ``(value, parts)``, each strictly better than the one before.

    ``cost(part)`` prices a (partial) part, ``score(parts)`` the finished
    partition; parts are lists of vertex ids in restricted-growth order.
    """
    best = [INF]
    parts: list = []

    def rec(v, running):
        if v == n:
            val = score(parts)
            if val < best[0] - TOL:
                best[0] = val
                found.append((val, [list(p) for p in parts]))
            return
        for i, p in enumerate(parts):
            if cap is not None and len(p) >= cap:
                continue
            p.append(v)
            c = cost(p)
            if max(running, c) < best[0] - TOL:
                rec(v + 1, max(running, c))
            p.pop()
        if len(parts) < k:
            parts.append([v])
            rec(v + 1, running)
            parts.pop()

    found: list = []
    rec(0, 0.0)
    return found


def exact_capmmtc(inst: Instance) -> tuple[float, Solution]:
    g = inst.graph
    if g.n > MAX_N or inst.k > MAX_K:
        raise TooLarge(f"oracle limited to n <= {MAX_N}, k <= {MAX_K}")
    lam = min(inst.lam, g.n)
    mc = shortest_paths(g)
    table = subset_costs(mc, list(range(g.n)))

    def cost(p):
        return table[frozenset(p)]

    def score(parts):
        return max(cost(p) for p in parts)

    found = _partitions(g.n, inst.k, lam, cost, score)
    if not found:
        raise NoRootAssignment("no finite partition respects k and lambda")
    val, parts = found[-1]
    trees = [CoverTree(subset_tree(g, mc, p), frozenset(p)) for p in parts]
    return val, Solution(trees, val, val, False, SolverConfig())


def _best_assignment(parts, roots, table):
    best, pick = INF, None
    for perm in permutations(roots, len(parts)):
        val = max(table[frozenset(p) | {r}] for p, r in zip(parts, perm))
        if val < best - TOL:
            best, pick = val, perm
    return best, pick


def exact_caprmmtc(inst: Instance) -> tuple[float, Solution]:
    g = inst.graph
    if not inst.rooted:
        raise ValueError("instance has no roots")
    if g.n > MAX_N_ROOTED or inst.k > MAX_K_ROOTED:
        raise TooLarge(f"rooted oracle limited to n <= {MAX_N_ROOTED}, k <= {MAX_K_ROOTED}")
    roots = list(inst.roots)
    mc = shortest_paths(g)
    table = subset_costs(mc, list(range(g.n)))

    def cost(p):
        return table[frozenset(p)]

    found = _partitions(g.n, inst.k, inst.lam, cost, lambda parts: _best_assignment(parts, roots, table)[0])
    if not found:
        raise NoRootAssignment("no partition admits a distinct-root assignment")
    val, parts = found[-1]
    _, pick = _best_assignment(parts, roots, table)
    trees = []
    for p, r in zip(parts, pick):
        part = frozenset(p)
        trees.append(CoverTree(subset_tree(g, mc, part | {r}), part, 0, r))
    for r in roots:
        if r not in pick:
            trees.append(CoverTree(subset_tree(g, mc, {r}), frozenset(), 0, r))
    return val, Solution(trees, val, val, True, SolverConfig())


def exact_mmtc(graph: WeightedGraph, k: int) -> float:
    if graph.n > MAX_N:
        raise TooLarge(f"oracle limited to n <= {MAX_N}")
    table = subset_costs(shortest_paths(graph), list(range(graph.n)))

    def cost(p):
        return table[frozenset(p)]

    found = _partitions(graph.n, k, None, cost, lambda parts: max(cost(p) for p in parts))
    return found[-1][0] if found else INF
