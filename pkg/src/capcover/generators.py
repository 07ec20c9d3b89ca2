"""Seeded instance families, connected by construction."""
from __future__ import annotations

import numpy as np

from .graph import WeightedGraph, shortest_paths
from .model import Instance

FAMILIES = ("random-geometric", "random-tree-plus", "clustered")


def _euclid(p, i, j) -> float:
    return round(float(np.hypot(*(p[i] - p[j]))), 6)


def _mst_pairs(points: np.ndarray) -> list:
    n = len(points)
    d = np.hypot(points[:, None, 0] - points[None, :, 0], points[:, None, 1] - points[None, :, 1])
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = d[0].copy()
    parent = np.zeros(n, dtype=np.int64)
    out = []
    for _ in range(n - 1):
        j = int(np.argmin(np.where(in_tree, np.inf, best)))
        in_tree[j] = True
        out.append((int(parent[j]), j))
        closer = d[j] < best
        best = np.where(closer, d[j], best)
        parent = np.where(closer, j, parent)
    return out


def random_geometric(n: int, rng) -> tuple[list, dict]:
    pts = rng.random((n, 2))
    radius = min(1.5, float(np.sqrt(2.0 * np.log(max(n, 2)) / max(n, 2))))
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            if np.hypot(*(pts[i] - pts[j])) <= radius:
                edges[(i, j)] = _euclid(pts, i, j)
    for i, j in _mst_pairs(pts):
        edges[(min(i, j), max(i, j))] = _euclid(pts, i, j)
    return [(u, v, w) for (u, v), w in sorted(edges.items())], {"radius": round(radius, 6)}


def random_tree_plus(n: int, rng) -> tuple[list, dict]:
    edges = {}
    for i in range(1, n):
        p = int(rng.integers(0, i))
        edges[(p, i)] = round(float(rng.uniform(1, 10)), 3)
    extra = n // 2
    for _ in range(extra):
        if n < 2:
            break
        u, v = sorted(int(x) for x in rng.choice(n, 2, replace=False))
        edges.setdefault((u, v), round(float(rng.uniform(1, 20)), 3))
    return [(u, v, w) for (u, v), w in sorted(edges.items())], {"extra_edges": extra}


def clustered(n: int, rng, clusters: int = 3) -> tuple[list, dict]:
    """Dense unit-disk clusters strung along a line ten units apart."""
    clusters = max(1, min(clusters, n))
    label = np.arange(n) % clusters
    angle = rng.uniform(0, 2 * np.pi, n)
    rad = np.sqrt(rng.random(n))
    pts = np.stack([10.0 * label + rad * np.cos(angle), rad * np.sin(angle)], axis=1)
    edges = {}
    members = [np.flatnonzero(label == c).tolist() for c in range(clusters)]
    for mem in members:
        for a in range(len(mem)):
            for b in range(a + 1, len(mem)):
                edges[(mem[a], mem[b])] = _euclid(pts, mem[a], mem[b])
    for c in range(clusters - 1):
        pairs = [(i, j) for i in members[c] for j in members[c + 1]]
        i, j = min(pairs, key=lambda e: (np.hypot(*(pts[e[0]] - pts[e[1]])), e))
        edges[(min(i, j), max(i, j))] = _euclid(pts, i, j)
    triples = [(u, v, w) for (u, v), w in sorted(edges.items())]
    mc = shortest_paths(WeightedGraph.from_edges(n, triples))
    same = label[:, None] == label[None, :]
    intra = float(mc.dist[same].max())
    inter = float(mc.dist[~same].min()) if clusters > 1 else None
    meta = {
        "clusters": clusters,
        "intra_diameter": round(intra, 6),
        "inter_distance": None if inter is None else round(inter, 6),
        "separated": inter is None or inter > intra,
    }
    return triples, meta


def generate(family: str, n: int, k: int, lam: int, seed: int, rooted: bool = False, clusters: int = 3) -> tuple:
    """Return ``(instance, meta)`` for the given family and parameters."""
    if n < 1 or k < 1 or lam < 1:
        raise ValueError("n, k and lambda must be positive")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if rooted and k > n:
        raise ValueError("rooted instances need k <= n")
    rng = np.random.default_rng(seed)
    if family == "random-geometric":
        triples, meta = random_geometric(n, rng)
    elif family == "random-tree-plus":
        triples, meta = random_tree_plus(n, rng)
    else:
        triples, meta = clustered(n, rng, clusters)
    roots = tuple(sorted(int(r) for r in rng.choice(n, k, replace=False))) if rooted else None
    meta = {"generator": family, "seed": seed, **meta}
    return Instance(WeightedGraph.from_edges(n, triples), k, lam, roots), meta
