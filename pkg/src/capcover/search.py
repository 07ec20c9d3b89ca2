"""Search over the guess ``t_star`` for the unrooted problem."""
from __future__ import annotations

import logging
from math import sqrt
from typing import Callable, Optional

from .capsolver import solve_component
from .graph import components, prune_edges, shortest_paths
from .model import GuessTooSmall, Infeasible, Instance, Solution, SolverConfig, Trace

log = logging.getLogger(__name__)


def solve_guess(inst: Instance, t_star: float, cfg: SolverConfig, trace: Optional[Trace] = None) -> list:
    """All trees for one guess; :class:`GuessTooSmall` if more than ``k``."""
    pruned = prune_edges(inst.graph, t_star)
    mc = shortest_paths(pruned)
    trees = []
    for comp in components(pruned):
        trees.extend(solve_component(pruned, mc, comp, inst.lam, t_star, cfg, trace))
        if len(trees) > inst.k:
            raise GuessTooSmall(f"{len(trees)} trees exceed k={inst.k} at t*={t_star:g}")
    return trees


def _order(trees: list) -> list:
    return sorted(trees, key=lambda t: min(t.cover))


def bracket_search(inst: Instance, cfg: SolverConfig, attempt: Callable, trace: Optional[Trace] = None):
    """Shared driver: ``attempt(t)`` returns trees or raises GuessTooSmall.

    Tries ``t = 0``, then finds a successful upper end (the total edge length,
    doubled if needed) and bisects geometrically between the smallest
    positive edge length and that end until ``hi <= (1 + eps) * lo``.
    Returns ``(trees, t_star, guesses)`` of the smallest-makespan success.
    """
    guesses = 0
    best = None

    def run(t):
        nonlocal guesses, best
        guesses += 1
        try:
            trees = attempt(t)
        except GuessTooSmall as exc:
            log.debug("guess %g failed: %s", t, exc)
            if trace is not None:
                trace.guesses.append((t, False))
            return False
        if trace is not None:
            trace.guesses.append((t, True))
        span = max((tr.cost for tr in trees), default=0.0)
        if best is None or span < best[0] - 1e-12 or (span <= best[0] + 1e-12 and t < best[2]):
            best = (span, trees, t)
        return True

    if run(0.0):
        return best[1], best[2], guesses
    positive = [w for w in inst.graph.lengths.values() if w > 0]
    if not positive:
        raise Infeasible("no positive edge lengths and the zero guess failed")
    lo = min(positive)
    hi = max(sum(positive), lo)
    while not run(hi):
        if guesses >= cfg.max_guesses:
            raise Infeasible("no successful guess found")
        lo, hi = hi, 2 * hi
    while hi > lo * (1 + cfg.epsilon) and guesses < cfg.max_guesses:
        mid = sqrt(lo * hi)
        if run(mid):
            hi = mid
        else:
            lo = mid
    return best[1], best[2], guesses


def search_solve(inst: Instance, cfg: SolverConfig = SolverConfig(), trace: Optional[Trace] = None) -> Solution:
    if inst.rooted:
        from .rooted import search_solve_rooted

        return search_solve_rooted(inst, cfg, trace)
    if inst.k * inst.lam < inst.n:
        raise Infeasible(f"k*lambda = {inst.k * inst.lam} < n = {inst.n}")
    trace = trace if trace is not None else Trace()
    trees, t_star, guesses = bracket_search(inst, cfg, lambda t: solve_guess(inst, t, cfg, trace), trace)
    trees = _order(trees)
    span = max((t.cost for t in trees), default=0.0)
    refinements = sum(r.refinements for r in trace.runs if r.t_star == t_star)
    return Solution(trees, span, t_star, False, cfg, refinements, guesses)
