"""Problem instances, solver configuration and solution containers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import Tree, WeightedGraph


class Infeasible(Exception):
    """No solution exists (or none was found in the search bracket)."""


class GuessTooSmall(Exception):
    """The current guess of the optimum cannot be certified; try a larger one."""


class InvariantError(AssertionError):
    """An internal guarantee of the pipeline did not hold."""


@dataclass(frozen=True)
class Instance:
    graph: WeightedGraph
    k: int
    lam: int
    roots: Optional[tuple] = None

    def __post_init__(self):
        if self.k < 1 or self.lam < 1:
            raise ValueError("k and lambda must be positive")
        if self.roots is not None:
            roots = tuple(sorted(set(self.roots)))
            if len(roots) != len(self.roots):
                raise ValueError("roots must be distinct")
            if any(not 0 <= r < self.graph.n for r in roots):
                raise ValueError("root outside the vertex range")
            if len(roots) != self.k:
                raise ValueError(f"rooted instance needs exactly k={self.k} roots, got {len(roots)}")
            object.__setattr__(self, "roots", roots)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def rooted(self) -> bool:
        return self.roots is not None


@dataclass(frozen=True)
class CoverTree:
    """A tree plus the vertices assigned to it.

    Dummy vertices are a bare count: they sit at distance zero from the tree
    and only matter for the counting in the merge/split stages.
    """

    tree: Tree
    cover: frozenset
    dummy_count: int = 0
    root: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.cover) + self.dummy_count

    @property
    def is_dummy_padded(self) -> bool:
        return self.dummy_count > 0

    @property
    def cost(self) -> float:
        return self.tree.cost


@dataclass(frozen=True)
class SolverConfig:
    gamma_s: float = 4.0
    beta: float = 4.0
    epsilon: float = 0.05
    c: int = 4
    seed: int = 0
    steiner_budget: int = 128
    max_guesses: int = 200

    def __post_init__(self):
        if self.gamma_s < 1 or self.beta < 1:
            raise ValueError("gamma_s and beta must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.c < 2:
            raise ValueError("merge arity c must be at least 2")

    @property
    def alpha(self) -> float:
        """Cost factor of the trees entering the merge/split stage."""
        return self.gamma_s + 2 * self.beta + 1

    @property
    def d_factor(self) -> float:
        return 2 * self.alpha + 3

    @property
    def merge_factor(self) -> float:
        return (self.c - 1) * self.d_factor + self.c * self.alpha

    @property
    def bound(self) -> float:
        """Makespan of one fixed-guess run, in units of the guess."""
        return self.d_factor + 2 * self.merge_factor

    @property
    def rooted_bound(self) -> float:
        """Rooted runs recluster at four times the guess, then attach roots."""
        return 4 * self.bound + 1

    def bounds(self) -> dict:
        return {
            "alpha": self.alpha,
            "c": self.c,
            "D_factor": self.d_factor,
            "merge_factor": self.merge_factor,
            "bound": self.bound,
            "rooted_bound": self.rooted_bound,
        }

    def echo(self) -> dict:
        return {
            "gamma_s": self.gamma_s,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "c": self.c,
            "seed": self.seed,
            "steiner_budget": self.steiner_budget,
        }


@dataclass
class RunRecord:
    """What one fixed-guess component run did; kept for invariant checks."""

    t_star: float
    lam: int
    q: int
    n_cover: int
    good_sizes: list = field(default_factory=list)
    good_costs: list = field(default_factory=list)
    partition_ok: bool = True
    v_bad: int = 0
    refinements: int = 0
    shrink_ok: bool = True


@dataclass
class Trace:
    runs: list = field(default_factory=list)
    guesses: list = field(default_factory=list)

    @property
    def refinements(self) -> int:
        return sum(r.refinements for r in self.runs)


@dataclass
class Solution:
    trees: list
    makespan: float
    t_star: float
    rooted: bool = False
    config: SolverConfig = field(default_factory=SolverConfig)
    refinements: int = 0
    guesses: int = 0

    @property
    def claimed_bound(self) -> float:
        f = self.config.rooted_bound if self.rooted else self.config.bound
        return f * self.t_star
