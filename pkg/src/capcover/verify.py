"""Feasibility checker for claimed solutions.

Deliberately self-contained: it rebuilds connectivity, cover accounting and
lengths from the instance graph instead of trusting any solver helper.
"""
from __future__ import annotations

from dataclasses import dataclass, field

CHECKS = ("tree_structure", "cover_partition", "capacity", "cover_in_tree", "tree_count", "roots", "makespan")


@dataclass
class VerifyReport:
    results: dict = field(default_factory=dict)  # check name -> list of failure messages

    def fail(self, check: str, msg: str):
        self.results.setdefault(check, []).append(msg)

    @property
    def ok(self) -> bool:
        return not any(self.results.get(c) for c in CHECKS)

    def passed(self, check: str) -> bool:
        return not self.results.get(check)

    def failed_checks(self) -> list:
        return [c for c in CHECKS if self.results.get(c)]

    def lines(self) -> list:
        out = []
        for c in CHECKS:
            msgs = self.results.get(c, [])
            out.append(f"{'PASS' if not msgs else 'FAIL'} {c}" + (f": {msgs[0]}" if msgs else ""))
        return out


def _connected_acyclic(vertices: set, edges: list) -> tuple[bool, str]:
    if not vertices:
        return False, "tree has no vertices"
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if u not in parent or v not in parent:
            return False, f"edge ({u}, {v}) leaves the vertex set"
        ru, rv = find(u), find(v)
        if ru == rv:
            return False, f"edge ({u}, {v}) closes a cycle"
        parent[ru] = rv
    if len({find(v) for v in vertices}) != 1:
        return False, "tree is disconnected"
    return True, ""


def check_solution(inst, solution, rooted=None, tol: float = 1e-9) -> VerifyReport:
    """Run every feasibility check; failures are collected, never raised."""
    rooted = inst.rooted if rooted is None else rooted
    g = inst.graph
    rep = VerifyReport()
    for c in CHECKS:
        rep.results[c] = []
    seen: dict = {}
    recomputed = 0.0
    for i, ct in enumerate(solution.trees):
        t = ct.tree
        edges = [tuple(sorted(e)) for e in t.edges]
        vertices = set(t.vertices)
        for u, v in edges:
            vertices.update((u, v))
        length = 0.0
        for u, v in edges:
            if (u, v) not in g.lengths:
                rep.fail("tree_structure", f"tree {i}: ({u}, {v}) is not a graph edge")
            else:
                length += g.lengths[(u, v)]
        ok, msg = _connected_acyclic(vertices, edges)
        if not ok:
            rep.fail("tree_structure", f"tree {i}: {msg}")
        if set(t.vertices) != vertices:
            rep.fail("tree_structure", f"tree {i}: vertex list disagrees with its edges")
        recomputed = max(recomputed, length)
        for v in ct.cover:
            if v in seen:
                rep.fail("cover_partition", f"vertex {v} covered by trees {seen[v]} and {i}")
            seen[v] = i
            if not 0 <= v < g.n:
                rep.fail("cover_partition", f"tree {i} covers unknown vertex {v}")
        if len(ct.cover) > inst.lam:
            rep.fail("capacity", f"tree {i} covers {len(ct.cover)} > lambda={inst.lam}")
        if not set(ct.cover) <= vertices:
            rep.fail("cover_in_tree", f"tree {i} covers vertices it does not contain")
    missing = [v for v in range(g.n) if v not in seen]
    if missing:
        rep.fail("cover_partition", f"{len(missing)} vertices uncovered, first {missing[0]}")
    if len(solution.trees) > inst.k:
        rep.fail("tree_count", f"{len(solution.trees)} trees exceed k={inst.k}")
    if rooted:
        roots = set(inst.roots or ())
        used = set()
        for i, ct in enumerate(solution.trees):
            r = ct.root
            if r is None or r not in roots:
                rep.fail("roots", f"tree {i} has no valid root")
            elif r in used:
                rep.fail("roots", f"root {r} used twice")
            elif r not in ct.tree.vertices:
                rep.fail("roots", f"tree {i} does not contain its root {r}")
            used.add(r)
    if abs(recomputed - solution.makespan) > tol * max(1.0, abs(recomputed)):
        rep.fail("makespan", f"claimed {solution.makespan!r}, recomputed {recomputed!r}")
    return rep
