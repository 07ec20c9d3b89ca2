"""Maximum bipartite matching and maximum-deficiency Hall sets."""
from __future__ import annotations

from dataclasses import dataclass, field


class NoDeficiency(ValueError):
    pass


@dataclass(frozen=True)
class BipartiteInstance:
    n_left: int
    n_right: int
    adj: tuple  # adj[b] = sorted tuple of right indices

    def __post_init__(self):
        for b, row in enumerate(self.adj):
            for q in row:
                if not 0 <= q < self.n_right:
                    raise ValueError(f"left vertex {b} has invalid neighbour {q}")
        if len(self.adj) != self.n_left:
            raise ValueError("adjacency must list every left vertex")

    @classmethod
    def from_lists(cls, n_right: int, adj) -> "BipartiteInstance":
        rows = tuple(tuple(sorted(set(r))) for r in adj)
        return cls(len(rows), n_right, rows)

    def neighbourhood(self, left) -> set:
        out = set()
        for b in left:
            out.update(self.adj[b])
        return out


@dataclass(frozen=True)
class MatchingOutcome:
    matching: tuple  # (b, q) pairs sorted by b
    unmatched_left: tuple
    deficiency: int
    hall_set: tuple = field(default=())

    def partner(self) -> dict:
        return dict(self.matching)


def max_matching(inst: BipartiteInstance) -> MatchingOutcome:
    """Kuhn's augmenting-path algorithm, left vertices and their neighbours
    both tried in ascending order."""
    match_right = [-1] * inst.n_right

    def augment(b, seen):
        for q in inst.adj[b]:
            if seen[q]:
                continue
            seen[q] = True
            if match_right[q] < 0 or augment(match_right[q], seen):
                match_right[q] = b
                return True
        return False

    for b in range(inst.n_left):
        augment(b, [False] * inst.n_right)
    pairs = sorted((b, q) for q, b in enumerate(match_right) if b >= 0)
    matched = {b for b, _ in pairs}
    unmatched = tuple(b for b in range(inst.n_left) if b not in matched)
    out = MatchingOutcome(tuple(pairs), unmatched, len(unmatched))
    if out.deficiency:
        out = MatchingOutcome(out.matching, unmatched, out.deficiency, tuple(max_deficiency_set(inst, out)))
    return out


def max_deficiency_set(inst: BipartiteInstance, outcome: MatchingOutcome) -> list[int]:
    """Left vertices reachable from unmatched left vertices along alternating
    paths. Its deficiency ``|S| - |N(S)|`` equals the number of unmatched
    left vertices, which is the largest deficiency of any subset."""
    if outcome.deficiency == 0:
        raise NoDeficiency("left side is perfectly matched")
    partner_of_right = {q: b for b, q in outcome.matching}
    reached = set(outcome.unmatched_left)
    stack = list(outcome.unmatched_left)
    while stack:
        b = stack.pop()
        for q in inst.adj[b]:
            nb = partner_of_right.get(q)
            if nb is not None and nb not in reached:
                reached.add(nb)
                stack.append(nb)
    return sorted(reached)
