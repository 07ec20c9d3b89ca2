"""Line-oriented instance and solution files.

Both formats are JSON Lines: a header object on line 1, then one record per
line (``[u, v, length]`` for instance edges, one object per tree for
solutions). Keys are sorted so equal inputs give byte-identical files.
"""
from __future__ import annotations

import json
import logging
from typing import Optional

from .graph import Tree, WeightedGraph
from .model import CoverTree, Instance, Solution, SolverConfig

FORMAT_VERSION = 1

log = logging.getLogger(__name__)


class FormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _load(line: str, no: int):
    try:
        return json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(no, f"invalid JSON ({exc.msg})") from None


def dumps_instance(inst: Instance, meta: Optional[dict] = None) -> str:
    head = {
        "format": "capcover-instance",
        "format_version": FORMAT_VERSION,
        "n": inst.n,
        "k": inst.k,
        "lambda": inst.lam,
        "roots": list(inst.roots) if inst.rooted else None,
        "meta": meta or {},
    }
    lines = [_dump(head)] + [_dump([u, v, w]) for u, v, w in inst.graph.edges]
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> tuple[Instance, dict]:
    lines = text.splitlines()
    if not lines:
        raise FormatError(1, "empty file")
    head = _load(lines[0], 1)
    if not isinstance(head, dict) or head.get("format") != "capcover-instance":
        raise FormatError(1, "missing capcover-instance header")
    if head.get("format_version") != FORMAT_VERSION:
        raise FormatError(1, f"unsupported format_version {head.get('format_version')!r}")
    for key in ("n", "k", "lambda"):
        if not isinstance(head.get(key), int) or isinstance(head.get(key), bool):
            raise FormatError(1, f"header field {key!r} must be an integer")
    n = head["n"]
    edges = []
    seen = set()
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        rec = _load(line, no)
        if (not isinstance(rec, list) or len(rec) != 3 or not all(isinstance(x, int) for x in rec[:2])
                or not isinstance(rec[2], (int, float)) or isinstance(rec[2], bool)):
            raise FormatError(no, "edge must be [u, v, length] with integer endpoints")
        u, v, w = rec
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise FormatError(no, f"bad endpoints ({u}, {v}) for n={n}")
        if w < 0 or w != w or w == float("inf"):
            raise FormatError(no, f"bad length {w!r}")
        key = (min(u, v), max(u, v))
        if key in seen:
            log.warning("line %d: duplicate edge (%d, %d) collapsed to the shorter length", no, u, v)
        seen.add(key)
        edges.append((u, v, w))
    try:
        roots = head.get("roots")
        inst = Instance(WeightedGraph.from_edges(n, edges), head["k"], head["lambda"],
                        tuple(roots) if roots is not None else None)
    except ValueError as exc:
        raise FormatError(1, str(exc)) from None
    return inst, head.get("meta") or {}


def read_instance(path) -> tuple[Instance, dict]:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def dumps_solution(sol: Solution, runtime_ms: Optional[float] = None) -> str:
    head = {
        "format": "capcover-solution",
        "format_version": FORMAT_VERSION,
        "makespan": sol.makespan,
        "t_star": sol.t_star,
        "rooted": sol.rooted,
        "tree_count": len(sol.trees),
        "config": sol.config.echo(),
        "bounds": {**sol.config.bounds(), "claimed": sol.claimed_bound},
        "refinements": sol.refinements,
        "guesses": sol.guesses,
    }
    if runtime_ms is not None:
        head["runtime_ms"] = round(runtime_ms, 3)
    lines = [_dump(head)]
    for t in sol.trees:
        lines.append(_dump({
            "root": t.root,
            "cover": sorted(t.cover),
            "vertices": sorted(t.tree.vertices),
            "edges": [list(e) for e in t.tree.edges],
            "cost": t.cost,
        }))
    return "\n".join(lines) + "\n"


def loads_solution(text: str) -> Solution:
    lines = text.splitlines()
    if not lines:
        raise FormatError(1, "empty file")
    head = _load(lines[0], 1)
    if not isinstance(head, dict) or head.get("format") != "capcover-solution":
        raise FormatError(1, "missing capcover-solution header")
    cfg_fields = head.get("config") or {}
    try:
        cfg = SolverConfig(**cfg_fields)
    except (TypeError, ValueError) as exc:
        raise FormatError(1, f"bad config: {exc}") from None
    trees = []
    for no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        rec = _load(line, no)
        try:
            edges = tuple(sorted((min(u, v), max(u, v)) for u, v in rec["edges"]))
            tree = Tree(frozenset(rec["vertices"]), edges, float(rec["cost"]))
            trees.append(CoverTree(tree, frozenset(rec["cover"]), 0, rec.get("root")))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(no, f"bad tree record ({exc})") from None
    return Solution(trees, float(head["makespan"]), float(head["t_star"]), bool(head.get("rooted")), cfg,
                    int(head.get("refinements", 0)), int(head.get("guesses", 0)))


def read_solution(path) -> Solution:
    with open(path, encoding="utf-8") as fh:
        return loads_solution(fh.read())
