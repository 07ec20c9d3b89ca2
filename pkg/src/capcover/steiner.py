"""q-terminal Steiner trees.

Two routes share one contract: :func:`exact_steiner` / the rooted exact DP
(Dreyfus-Wagner over the metric closure, factor 1) and a greedy
nearest-terminal heuristic for inputs whose subset table would be too big.
The heuristic reports ``factor_bound = inf`` because it carries no proven
guarantee.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np

from .graph import INF, MetricClosure, Tree, WeightedGraph, spanning_tree, trivial_tree

MAX_EXACT_TERMINALS = 10


class TerminalUnreachable(ValueError):
    pass


class TooManyTerminals(ValueError):
    pass


@dataclass(frozen=True)
class SteinerRequest:
    graph: WeightedGraph
    mc: MetricClosure
    terminals: frozenset
    q: int
    root: Optional[int] = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be at least 1")
        if not self.terminals:
            raise ValueError("terminal set is empty")


@dataclass(frozen=True)
class SteinerResult:
    tree: Tree
    spanned_terminals: frozenset
    cost: float
    factor_bound: float


class _DreyfusWagner:
    """Subset DP: ``table[mask][v]`` is the cheapest tree spanning the
    terminals in ``mask`` plus vertex ``v`` (closure metric)."""

    def __init__(self, mc: MetricClosure, terms: list[int], max_size: int):
        self.mc = mc
        self.terms = terms
        self.table: dict = {}
        self.split: dict = {}
        self.relax: dict = {}
        dist = mc.dist
        m = len(terms)
        for size in range(1, max_size + 1):
            for combo in combinations(range(m), size):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                if size == 1:
                    self.table[mask] = dist[terms[combo[0]]].copy()
                    continue
                low = mask & -mask
                rest = mask ^ low
                best = np.full(dist.shape[0], INF)
                arg = np.zeros(dist.shape[0], dtype=np.int64)
                sub = rest
                # submasks A of mask that contain the lowest bit, A != mask
                while True:
                    a = sub | low
                    if a != mask:
                        vals = self.table[a] + self.table[mask ^ a]
                        better = vals < best
                        best = np.where(better, vals, best)
                        arg = np.where(better, a, arg)
                    if sub == 0:
                        break
                    sub = (sub - 1) & rest
                via = best[:, None] + dist
                self.relax[mask] = np.argmin(via, axis=0)
                self.table[mask] = via[self.relax[mask], np.arange(dist.shape[0])]
                self.split[mask] = arg

    def edges(self, mask: int, v: int) -> list[tuple[int, int]]:
        if mask & (mask - 1) == 0:
            t = self.terms[mask.bit_length() - 1]
            return self.mc.path_edges(t, v)
        u = int(self.relax[mask][v])
        a = int(self.split[mask][u])
        return self.mc.path_edges(u, v) + self.edges(a, u) + self.edges(mask ^ a, u)


def exact_steiner(req: SteinerRequest) -> SteinerResult:
    """Minimum tree spanning every terminal of ``req`` (``q`` must equal the
    terminal count)."""
    terms = sorted(req.terminals)
    if req.q != len(terms):
        raise ValueError("exact_steiner spans all terminals; q must equal |R|")
    if len(terms) > MAX_EXACT_TERMINALS:
        raise TooManyTerminals(f"{len(terms)} terminals exceed the DP cap of {MAX_EXACT_TERMINALS}")
    base = terms[0]
    for t in terms[1:]:
        if not np.isfinite(req.mc.dist[base, t]):
            raise TerminalUnreachable(f"terminals {base} and {t} are disconnected")
    if len(terms) == 1:
        return SteinerResult(trivial_tree(base), frozenset(terms), 0.0, 1.0)
    others = terms[1:]
    dw = _DreyfusWagner(req.mc, others, len(others))
    full = (1 << len(others)) - 1
    tree = spanning_tree(req.graph, dw.edges(full, base), terms)
    return SteinerResult(tree, frozenset(terms), tree.cost, 1.0)


def subset_costs(mc: MetricClosure, terms: list[int]) -> dict:
    """Exact Steiner cost of every nonempty subset of ``terms``, keyed by the
    frozenset of vertices. Used by the brute-force oracles."""
    terms = sorted(terms)
    out = {frozenset([t]): 0.0 for t in terms}
    if len(terms) < 2:
        return out
    if len(terms) > MAX_EXACT_TERMINALS:
        raise TooManyTerminals(f"{len(terms)} terminals exceed the DP cap of {MAX_EXACT_TERMINALS}")
    m = len(terms)
    dw = _DreyfusWagner(mc, terms, m - 1)
    for mask in range(1, 1 << m):
        if mask & (mask - 1) == 0:
            continue
        low = (mask & -mask).bit_length() - 1
        members = frozenset(terms[i] for i in range(m) if mask >> i & 1)
        out[members] = float(dw.table[mask ^ (1 << low)][terms[low]])
    return out


def subset_tree(graph: WeightedGraph, mc: MetricClosure, part) -> Tree:
    """An optimal Steiner tree for ``part`` (witness reconstruction)."""
    part = frozenset(part)
    return exact_steiner(SteinerRequest(graph, mc, part, len(part))).tree


def rooted_subset_count(reachable: int, need: int) -> int:
    return sum(comb(reachable, i) for i in range(1, need + 1))


def approx_q_steiner(req: SteinerRequest, budget: int = 128) -> Optional[SteinerResult]:
    """Tree through ``req.root`` spanning ``req.q`` terminals.

    Exact when the rooted subset table has at most ``budget`` entries (and
    always for q <= 2), greedy otherwise. Returns ``None`` when fewer than
    ``q`` terminals are reachable from the root.
    """
    if req.root is None:
        raise ValueError("approx_q_steiner needs a root")
    mc, root = req.mc, req.root
    row = mc.dist[root]
    reach = sorted(t for t in req.terminals if np.isfinite(row[t]))
    if len(reach) < req.q:
        return None
    has_root = root in req.terminals
    others = [t for t in reach if t != root]
    need = req.q - int(has_root)
    if need == 0:
        return SteinerResult(trivial_tree(root), frozenset([root]), 0.0, 1.0)
    if need == 1:
        nearest = min(others, key=lambda t: (row[t], t))
        chosen = {nearest} | ({root} if has_root else set())
        tree = spanning_tree(req.graph, mc.path_edges(root, nearest), [root])
        return SteinerResult(tree, frozenset(chosen), tree.cost, 1.0)
    if rooted_subset_count(len(others), need) <= budget:
        return _exact_rooted(req, others, need, has_root)
    return _greedy_rooted(req, others, need, has_root)


def _exact_rooted(req, others, need, has_root) -> SteinerResult:
    dw = _DreyfusWagner(req.mc, others, need)
    best, best_mask = INF, None
    for combo in combinations(range(len(others)), need):
        mask = sum(1 << i for i in combo)
        c = dw.table[mask][req.root]
        if c < best:
            best, best_mask = c, mask
    chosen = {others[i] for i in range(len(others)) if best_mask >> i & 1}
    if has_root:
        chosen.add(req.root)
    tree = spanning_tree(req.graph, dw.edges(best_mask, req.root), [req.root])
    return SteinerResult(tree, frozenset(chosen), tree.cost, 1.0)


def _greedy_rooted(req, others, need, has_root) -> SteinerResult:
    mc = req.mc
    in_tree = np.zeros(mc.dist.shape[0], dtype=bool)
    in_tree[req.root] = True
    # nearest tree vertex for every vertex, kept incrementally
    near = mc.dist[req.root].copy()
    src = np.full(mc.dist.shape[0], req.root)
    cand = np.array(others)
    picked = np.zeros(len(others), dtype=bool)
    edges = []
    chosen = {req.root} if has_root else set()
    for _ in range(need):
        d = np.where(picked, INF, near[cand])
        i = int(np.argmin(d))
        t = int(cand[i])
        picked[i] = True
        chosen.add(t)
        path = mc.path(int(src[t]), t)
        edges.extend(mc.path_edges(int(src[t]), t))
        for v in path:
            if not in_tree[v]:
                in_tree[v] = True
                closer = mc.dist[v] < near
                near = np.where(closer, mc.dist[v], near)
                src = np.where(closer, v, src)
    tree = spanning_tree(req.graph, edges, [req.root])
    return SteinerResult(tree, frozenset(chosen), tree.cost, INF)
