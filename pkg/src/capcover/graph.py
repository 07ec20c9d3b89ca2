"""Weighted undirected graphs, metric closures and the tree helpers shared by
every solver stage.

Vertices are the integers ``0..n-1``. All lengths are floats; threshold
comparisons go through :data:`TOL`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TOL = 1e-9
INF = float("inf")


def leq(a: float, b: float) -> bool:
    """``a <= b`` up to the global absolute tolerance."""
    return a <= b + TOL


def _key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    lengths: dict = field(repr=False)  # (u, v) with u < v -> length

    def __post_init__(self):
        adj = [[] for _ in range(self.n)]
        for (u, v), w in sorted(self.lengths.items()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        object.__setattr__(self, "_adj", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "WeightedGraph":
        """Build a graph from ``(u, v, length)`` triples.

        Parallel edges collapse to the shortest one. Self-loops, bad ids and
        negative or non-finite lengths raise ``ValueError``.
        """
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        lengths: dict = {}
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not np.isfinite(w) or w < 0:
                raise ValueError(f"edge ({u}, {v}) has invalid length {w}")
            k = _key(u, v)
            if k not in lengths or w < lengths[k]:
                lengths[k] = w
        return cls(n, lengths)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(u, v, w) for (u, v), w in sorted(self.lengths.items())]

    def neighbors(self, u: int):
        return self._adj[u]

    def length(self, u: int, v: int) -> float:
        return self.lengths[_key(u, v)]

    def has_edge(self, u: int, v: int) -> bool:
        return _key(u, v) in self.lengths

    def total_length(self) -> float:
        return float(sum(self.lengths.values()))


@dataclass(frozen=True)
class MetricClosure:
    """All-pairs shortest-path distances plus a predecessor matrix.

    ``pred[i, j]`` is the vertex preceding ``j`` on the stored shortest path
    from ``i``; ``-1`` when ``i == j`` or ``j`` is unreachable.
    """

    dist: np.ndarray
    pred: np.ndarray

    def d(self, u: int, v: int) -> float:
        return float(self.dist[u, v])

    def path(self, u: int, v: int) -> list[int]:
        if u == v:
            return [u]
        if not np.isfinite(self.dist[u, v]):
            raise ValueError(f"no path between {u} and {v}")
        out = [v]
        while out[-1] != u:
            out.append(int(self.pred[u, out[-1]]))
        out.reverse()
        return out

    def path_edges(self, u: int, v: int) -> list[tuple[int, int]]:
        p = self.path(u, v)
        return [_key(a, b) for a, b in zip(p, p[1:])]


@dataclass(frozen=True)
class Tree:
    """A tree given by its vertex set and its edge list.

    ``closure`` marks trees whose edges live in a metric closure rather than
    in the graph itself; such trees are expanded before they leave a solver.
    """

    vertices: frozenset
    edges: tuple = ()
    cost: float = 0.0
    closure: bool = False

    @property
    def min_vertex(self) -> int:
        return min(self.vertices)


def trivial_tree(v: int) -> Tree:
    return Tree(frozenset([v]))


def shortest_paths(g: WeightedGraph) -> MetricClosure:
    """Floyd-Warshall over the whole graph, vectorised per pivot.

    Only strict improvements replace a stored path, so the result depends on
    nothing but the graph.
    """
    n = g.n
    dist = np.full((n, n), INF)
    np.fill_diagonal(dist, 0.0)
    pred = np.full((n, n), -1, dtype=np.int64)
    for (u, v), w in g.lengths.items():
        dist[u, v] = dist[v, u] = w
        pred[u, v] = u
        pred[v, u] = v
    for k in range(n):
        via = dist[:, k : k + 1] + dist[k : k + 1, :]
        better = via < dist
        if better.any():
            dist = np.where(better, via, dist)
            pred = np.where(better, np.broadcast_to(pred[k : k + 1, :], (n, n)), pred)
    return MetricClosure(dist, pred)


def prune_edges(g: WeightedGraph, t_star: float) -> WeightedGraph:
    if t_star < 0:
        raise ValueError("t_star must be non-negative")
    return WeightedGraph(g.n, {e: w for e, w in g.lengths.items() if leq(w, t_star)})


def components(g: WeightedGraph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest id."""
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], [s]
        while stack:
            u = stack.pop()
            for v, _ in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
                    comp.append(v)
        out.append(sorted(comp))
    return out


def linkage_clusters(vertices: Sequence[int], mc: MetricClosure, threshold: float) -> list[list[int]]:
    """Single-linkage clusters of ``vertices``: two vertices share a cluster
    when a chain of pairwise distances ``<= threshold`` joins them."""
    vs = sorted(vertices)
    if not vs:
        return []
    sub = mc.dist[np.ix_(vs, vs)] <= threshold + TOL
    label = [-1] * len(vs)
    out = []
    for s in range(len(vs)):
        if label[s] >= 0:
            continue
        label[s] = len(out)
        stack, members = [s], [s]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(sub[i]):
                if label[j] < 0:
                    label[j] = label[s]
                    stack.append(j)
                    members.append(j)
        out.append(sorted(vs[i] for i in members))
    return out


def tree_distance(t1: Tree, t2: Tree, mc: MetricClosure) -> tuple[float, tuple[int, int]]:
    """Closest vertex pair between two trees; ties go to the smallest
    ``(u, v)`` in lexicographic order."""
    a = sorted(t1.vertices)
    b = sorted(t2.vertices)
    sub = mc.dist[np.ix_(a, b)]
    i = int(np.argmin(sub))
    r, c = divmod(i, len(b))
    return float(sub[r, c]), (a[r], b[c])


def set_distances(trees: Sequence[Tree], targets: Sequence[Tree], mc: MetricClosure) -> np.ndarray:
    """Matrix of ``tree_distance`` values without the witness pairs."""
    out = np.empty((len(trees), len(targets)))
    cols = [sorted(t.vertices) for t in targets]
    for i, t in enumerate(trees):
        rows = mc.dist[sorted(t.vertices)]
        mins = rows.min(axis=0)
        for j, c in enumerate(cols):
            out[i, j] = mins[c].min()
    return out


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def spanning_tree(g: WeightedGraph, edges: Iterable[tuple[int, int]], vertices: Iterable[int] = ()) -> Tree:
    """Minimum spanning tree of the subgraph formed by ``edges`` (graph edges)
    plus any isolated ``vertices``. Raises ``ValueError`` if that subgraph is
    disconnected."""
    es = sorted({_key(u, v) for u, v in edges}, key=lambda e: (g.length(*e), e))
    vs = set(vertices)
    for u, v in es:
        vs.add(u)
        vs.add(v)
    if not vs:
        raise ValueError("empty tree")
    dsu = _DSU()
    kept = []
    cost = 0.0
    for u, v in es:
        if dsu.union(u, v):
            kept.append((u, v))
            cost += g.length(u, v)
    roots = {dsu.find(v) for v in vs}
    if len(roots) > 1:
        raise ValueError("edge set does not form a connected subgraph")
    return Tree(frozenset(vs), tuple(sorted(kept)), cost)


def expand_tree(g: WeightedGraph, mc: MetricClosure, t: Tree) -> Tree:
    """Replace closure edges by their shortest paths in ``g``."""
    if not t.closure:
        return t
    edges = []
    for u, v in t.edges:
        edges.extend(mc.path_edges(u, v))
    return spanning_tree(g, edges, t.vertices)


def join_trees(g: WeightedGraph, mc: MetricClosure, trees: Sequence[Tree], links=None) -> Tree:
    """Union of ``trees`` with a shortest connecting path between each pair of
    consecutive trees (or between the explicit vertex pairs in ``links``)."""
    edges = []
    vertices = set()
    for t in trees:
        edges.extend(t.edges)
        vertices |= t.vertices
    if links is None:
        links = [tree_distance(a, b, mc)[1] for a, b in zip(trees, trees[1:])]
    for u, v in links:
        edges.extend(mc.path_edges(u, v))
    return spanning_tree(g, edges, vertices)


def trim_tree(g: WeightedGraph, t: Tree, keep: Iterable[int]) -> Tree:
    """Repeatedly drop leaves outside ``keep``; the result still spans every
    kept vertex and costs no more than ``t``."""
    keep = set(keep) & t.vertices
    if not keep:
        keep = {t.min_vertex}
    adj: dict = {v: set() for v in t.vertices}
    for u, v in t.edges:
        adj[u].add(v)
        adj[v].add(u)
    leaves = [v for v in adj if len(adj[v]) <= 1 and v not in keep]
    while leaves:
        v = leaves.pop()
        if v not in adj or v in keep:
            continue
        for u in adj.pop(v):
            adj[u].discard(v)
            if len(adj[u]) <= 1 and u not in keep:
                leaves.append(u)
    edges = [(u, v) for u, v in t.edges if u in adj and v in adj]
    return Tree(frozenset(adj), tuple(edges), float(sum(g.length(u, v) for u, v in edges)))
