"""Uncapacitated min-max tree cover subroutine (MST splitting, factor 4).

Works on a complete metric over a vertex subset: drop pairs farther apart
than the budget, take an MST per component and chop each MST bottom-up into
pieces of cost at most four times the budget.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import floor
from typing import Callable, Sequence

import numpy as np

from .graph import TOL, Tree
from .model import CoverTree

BETA = 4.0


class PromiseViolated(Exception):
    """No cover with ``k`` trees of cost ``t_in`` can exist (certified)."""


class EdgeTooLong(ValueError):
    pass


@dataclass(frozen=True)
class MmtcRequest:
    vertices: tuple  # global vertex ids, ascending
    dist: np.ndarray  # complete metric over ``vertices`` (local indices)
    k: int
    t_in: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.t_in < 0:
            raise ValueError("t_in must be non-negative")
        if self.dist.shape != (len(self.vertices), len(self.vertices)):
            raise ValueError("dist must be square over the vertex list")


@dataclass(frozen=True)
class MmtcResult:
    trees: list  # CoverTree with closure trees over global ids
    beta: float = BETA


def _prim(dist: np.ndarray, idx: list[int], cap: float) -> list[tuple[int, int]]:
    sub = dist[np.ix_(idx, idx)]
    sub = np.where(sub <= cap + TOL, sub, np.inf)
    m = len(idx)
    in_tree = np.zeros(m, dtype=bool)
    in_tree[0] = True
    best = sub[0].copy()
    parent = np.zeros(m, dtype=np.int64)
    edges = []
    for _ in range(m - 1):
        cand = np.where(in_tree, np.inf, best)
        j = int(np.argmin(cand))
        if not np.isfinite(cand[j]):
            raise ValueError("component is not connected under the cap")
        in_tree[j] = True
        edges.append((idx[int(parent[j])], idx[j]))
        closer = sub[j] < best
        best = np.where(closer, sub[j], best)
        parent = np.where(closer, j, parent)
    return edges


def _closure_tree(vertices, edges, length) -> Tree:
    es = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    return Tree(frozenset(vertices), es, float(sum(length(u, v) for u, v in es)), closure=True)


def split_heavy_tree(t: Tree, bound: float, length: Callable[[int, int], float]) -> list[Tree]:
    """Chop ``t`` into edge-disjoint subtrees of cost at most ``4 * bound``.

    Post-order sweep: once the residual weight below a vertex reaches
    ``2 * bound`` the children's branches are cut off, single branches of
    weight ``>= 2 * bound`` alone and lighter ones in greedy groups. Every cut
    piece weighs at least ``2 * bound``, so at most ``floor(W / 2 bound) + 1``
    pieces come out.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    for u, v in t.edges:
        if length(u, v) > bound + TOL:
            raise EdgeTooLong(f"edge ({u}, {v}) is longer than {bound}")
    if t.cost <= 4 * bound:
        return [t]
    adj: dict = {v: [] for v in t.vertices}
    for u, v in t.edges:
        adj[u].append(v)
        adj[v].append(u)
    root = t.min_vertex
    order, parent = [], {root: None}
    stack = [root]
    while stack:
        u = stack.pop()
        order.append(u)
        for v in sorted(adj[u], reverse=True):
            if v not in parent:
                parent[v] = u
                stack.append(v)
    residual = {}  # vertex -> (weight, edges, vertices) still hanging below it
    pieces = []
    for v in reversed(order):
        kids = sorted(c for c in adj[v] if parent.get(c) == v)
        branches = []
        for c in kids:
            w, es, vs = residual.pop(c)
            branches.append((w + length(v, c), es + [(v, c)], vs | {c}))
        group_w, group_e, group_v = 0.0, [], set()
        for w, es, vs in branches:
            if w >= 2 * bound:
                pieces.append((es, vs | {v}))
                continue
            group_w += w
            group_e += es
            group_v |= vs
            if group_w >= 2 * bound:
                pieces.append((group_e, group_v | {v}))
                group_w, group_e, group_v = 0.0, [], set()
        residual[v] = (group_w, group_e, group_v)
    w, es, vs = residual.pop(root)
    if es or not any(root in pv for _, pv in pieces):
        pieces.append((es, vs | {root}))
    return [_closure_tree(vs, es, length) if t.closure else _graph_like(vs, es, length) for es, vs in pieces]


def _graph_like(vertices, edges, length) -> Tree:
    t = _closure_tree(vertices, edges, length)
    return Tree(t.vertices, t.edges, t.cost, closure=False)


def _components(dist: np.ndarray, cap: float) -> list[list[int]]:
    adj = dist <= cap + TOL
    m = dist.shape[0]
    label = [-1] * m
    out = []
    for s in range(m):
        if label[s] >= 0:
            continue
        label[s] = len(out)
        stack, members = [s], [s]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(adj[i]):
                if label[j] < 0:
                    label[j] = label[s]
                    stack.append(j)
                    members.append(j)
        out.append(sorted(members))
    return out


def solve_mmtc(req: MmtcRequest) -> MmtcResult:
    """At most ``req.k`` closure trees of cost ``<= 4 * t_in`` covering the
    request's vertices, or :class:`PromiseViolated` when the MST lower bound
    already rules out a ``k``-tree cover of cost ``t_in``."""
    vs = req.vertices
    dist = req.dist

    def length(u, v):
        return float(dist[pos[u], pos[v]])

    pos = {v: i for i, v in enumerate(vs)}
    comps = _components(dist, req.t_in)
    plans = []
    for comp in comps:
        edges = _prim(dist, comp, req.t_in)
        g_edges = [(vs[a], vs[b]) for a, b in edges]
        tree = _closure_tree([vs[i] for i in comp], g_edges, length)
        if req.t_in <= TOL:
            need = 1
        else:
            need = floor(tree.cost / (2 * req.t_in)) + 1
        plans.append((tree, need))
    total = sum(n for _, n in plans)
    if total > req.k:
        raise PromiseViolated(f"MST bound needs {total} trees, budget is {req.k}")
    out = []
    assigned = set()
    for tree, _ in plans:
        parts = [tree] if req.t_in <= TOL else split_heavy_tree(tree, req.t_in, length)
        for p in parts:
            cover = frozenset(v for v in p.vertices if v not in assigned)
            assigned |= cover
            if cover:
                out.append(CoverTree(p, cover))
    return MmtcResult(out)


def metric_request(mc_dist: np.ndarray, vertices: Sequence[int], k: int, t_in: float) -> MmtcRequest:
    vs = tuple(sorted(vertices))
    return MmtcRequest(vs, mc_dist[np.ix_(vs, vs)], k, t_in)
