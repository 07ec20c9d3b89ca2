import random
from math import ceil

import pytest

from brute import hop_distances
from conftest import random_connected_graph
from capcover import CoverTree, Instance, SolverConfig, Trace, WeightedGraph, check_solution, search_solve
from capcover.capsolver import (
    Disconnected,
    NotDivisible,
    RefineState,
    absorb_and_pad,
    build_bipartite,
    cube_walk,
    hamiltonian_order,
    iter_refine,
    merge_big,
    pad_to_multiple,
    phase_a,
    solve_component,
    split_exact,
    strip_dummies,
)
from capcover.graph import Tree, shortest_paths, trivial_tree
from capcover.matching import MatchingOutcome
from capcover.model import Infeasible
from capcover.steiner import SteinerRequest, exact_steiner

CFG = SolverConfig()


def single(v, dummies=0):
    return CoverTree(trivial_tree(v), frozenset([v]), dummies)


def whole(g, mc, vs, cover=None, dummies=0):
    vs = frozenset(vs)
    tree = exact_steiner(SteinerRequest(g, mc, vs, len(vs))).tree
    return CoverTree(tree, frozenset(cover if cover is not None else vs), dummies)


class TestPhaseA:
    def test_quarter_capacity_one_gives_singletons(self, path4):
        out = phase_a(path4, shortest_paths(path4), range(4), 4, 1.0, CFG)
        assert [sorted(t.cover) for t in out.lambda_good] == [[0], [1], [2], [3]]
        assert out.v_bad == []

    def test_star_leaves_last_leaf_bad(self):
        g = WeightedGraph.from_edges(3, [(0, 1, 1), (0, 2, 1)])
        out = phase_a(g, shortest_paths(g), range(3), 8, 1.0, CFG)
        assert [sorted(t.cover) for t in out.lambda_good] == [[0, 1]]
        assert out.v_bad == [2]

    def test_two_pairs_all_good(self):
        g = WeightedGraph.from_edges(4, [(0, 1, 1), (2, 3, 1), (1, 2, 1)])
        out = phase_a(g, shortest_paths(g), range(4), 8, 1.0, CFG)
        assert [sorted(t.cover) for t in out.lambda_good] == [[0, 1], [2, 3]]
        assert out.v_bad == []

    def test_threshold_rejects_expensive_trees(self):
        g = WeightedGraph.from_edges(2, [(0, 1, 5)])
        out = phase_a(g, shortest_paths(g), range(2), 8, 1.0, CFG)
        assert out.lambda_good == [] and out.v_bad == [0, 1]


class TestBipartite:
    def setup_method(self):
        self.g = WeightedGraph.from_edges(4, [(0, 1, 0), (1, 2, 2), (2, 3, 3)])
        self.mc = shortest_paths(self.g)

    def test_edges_by_distance(self):
        state = RefineState([single(0), single(2), single(3)], [single(1)])
        inst = build_bipartite(state, self.mc, 2.0)
        # 0 is at distance 0, 2 exactly at t*, 3 at t* + 3
        assert inst.adj == ((0,), (0,), ())


class TestIterRefine:
    def test_no_bad_vertices(self, path4):
        state, out = iter_refine(RefineState([], [single(0)]), path4, shortest_paths(path4), 1.0, CFG)
        assert state.t == 0 and out.matching == ()

    def test_perfect_matching_needs_no_refinement(self, path4):
        state = RefineState([single(1), single(2)], [single(0), single(3)])
        state, out = iter_refine(state, path4, shortest_paths(path4), 1.0, CFG)
        assert state.t == 0 and out.deficiency == 0

    def test_colocated_pair_merges_once(self):
        g = WeightedGraph.from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 0)])
        mc = shortest_paths(g)
        state = RefineState([single(2), single(3)], [whole(g, mc, {0, 1})])
        state, out = iter_refine(state, g, mc, 1.0, CFG)
        assert state.t == 1 and state.sizes == [2, 1]
        assert [sorted(b.cover) for b in state.bad] == [[2, 3]]
        assert out.deficiency == 0


class TestAbsorbAndPad:
    def setup_method(self):
        self.g = WeightedGraph.from_edges(4, [(0, 1, 1), (1, 2, 0.5), (2, 3, 1)])
        self.mc = shortest_paths(self.g)
        self.good = whole(self.g, self.mc, {0, 1})

    def test_no_bad_trees(self):
        state = RefineState([], [self.good])
        assert absorb_and_pad(state, MatchingOutcome((), (), 0), 8, 1.0, self.g, self.mc) == [self.good]

    def test_matched_bad_singleton_joins(self):
        state = RefineState([single(2)], [self.good])
        out = absorb_and_pad(state, MatchingOutcome(((0, 0),), (), 0), 8, 1.0, self.g, self.mc)
        assert len(out) == 1
        assert out[0].cost == pytest.approx(1.5)
        assert out[0].size == 3

    def test_unmatched_bad_tree_gets_dummies(self):
        state = RefineState([single(3)], [self.good])
        out = absorb_and_pad(state, MatchingOutcome((), (0,), 1, (0,)), 8, 1.0, self.g, self.mc)
        padded = out[-1]
        assert padded.dummy_count == 4 and padded.size == 5 and padded.is_dummy_padded


class TestPadToMultiple:
    @pytest.mark.parametrize("sizes, lam, added", [((3, 4), 4, 1), ((4, 4), 4, 0), ((1,), 3, 2)])
    def test_padding(self, sizes, lam, added):
        trees = [CoverTree(trivial_tree(i), frozenset(range(10 * i, 10 * i + s))) for i, s in enumerate(sizes)]
        out = pad_to_multiple(trees, lam)
        assert sum(t.size for t in out) == sum(sizes) + added
        assert out[0].dummy_count == added


class TestHamiltonianOrder:
    def test_single_tree(self, path4):
        t = single(0)
        assert hamiltonian_order([t], shortest_paths(path4), 1.0) == [t]

    def test_path_of_three(self, path4):
        mc = shortest_paths(path4)
        trees = [single(0), single(1), single(2)]
        order = [min(t.cover) for t in hamiltonian_order(trees, mc, 1.0)]
        assert sorted(order) == [0, 1, 2]
        # any order of three path nodes is within three hops
        assert all(abs(a - b) <= 3 for a, b in zip(order, order[1:]))

    def test_star_with_four_leaves(self):
        adj = [[1, 2, 3, 4], [0], [0], [0], [0]]
        order = cube_walk(adj)
        hops = hop_distances(adj)
        assert sorted(order) == list(range(5))
        assert all(hops[a][b] <= 3 for a, b in zip(order, order[1:]))

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            cube_walk([[1], [0], []])

    def test_random_graphs_have_short_hops(self):
        rng = random.Random(6)
        for _ in range(100):
            n = rng.randint(1, 30)
            adj = [set() for _ in range(n)]
            for v in range(1, n):
                u = rng.randrange(v)
                adj[u].add(v)
                adj[v].add(u)
            adj = [sorted(a) for a in adj]
            order = cube_walk(adj)
            hops = hop_distances(adj)
            assert sorted(order) == list(range(n))
            assert all(hops[a][b] <= 3 for a, b in zip(order, order[1:]))


def line_graph(m, gap=1.0):
    return WeightedGraph.from_edges(m, [(i, i + 1, gap) for i in range(m - 1)])


class TestMergeBig:
    def test_one_full_group(self):
        g = line_graph(4)
        out = merge_big([single(i) for i in range(4)], 4, 4, g, shortest_paths(g))
        assert len(out) == 1 and out[0].size == 4 and out[0].cost == 3

    def test_remainder_group(self):
        g = line_graph(5)
        out = merge_big([single(i) for i in range(5)], 4, 4, g, shortest_paths(g))
        assert [t.size for t in out] == [4, 1]

    def test_single_tree_unchanged(self):
        t = single(0)
        assert merge_big([t], 4, 4, line_graph(1), shortest_paths(line_graph(1))) == [t]


class TestSplitExact:
    def test_pure_partition(self, path4):
        mc = shortest_paths(path4)
        head = whole(path4, mc, range(4))
        out = split_exact([head], 2, path4, mc)
        assert [sorted(t.cover) for t in out] == [[0, 1], [2, 3]]
        assert all(t.cost <= head.cost for t in out)

    def test_bridge_borrows_from_next(self):
        # trees {0} and {2,3,4}; the gap 0-2 is the inter-tree distance D = 2
        g = WeightedGraph.from_edges(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])
        mc = shortest_paths(g)
        a, b = single(0), whole(g, mc, {2, 3, 4})
        out = split_exact([a, b], 2, g, mc)
        assert [sorted(t.cover) for t in out] == [[0, 2], [3, 4]]
        assert out[0].cost <= 2 + a.cost + b.cost
        assert out[1].tree == b.tree

    def test_each_tree_split_in_place(self, path4):
        mc = shortest_paths(path4)
        a, b = whole(path4, mc, {0, 1}), whole(path4, mc, {2, 3})
        out = split_exact([a, b], 2, path4, mc)
        assert [t.tree for t in out] == [a.tree, b.tree]

    def test_not_divisible(self, path4):
        with pytest.raises(NotDivisible):
            split_exact([single(0)], 2, path4, shortest_paths(path4))


class TestStripDummies:
    def test_drops_dummy_count(self):
        t = CoverTree(Tree(frozenset({0, 1, 2}), ((0, 1), (1, 2)), 2.0), frozenset({0, 1, 2}), 1)
        assert strip_dummies([t])[0].size == 3

    def test_only_dummies_dropped(self):
        assert strip_dummies([CoverTree(trivial_tree(0), frozenset(), 3)]) == []

    def test_no_dummies_unchanged(self):
        t = single(4)
        assert strip_dummies([t]) == [t]


class TestSolveComponent:
    def test_single_vertex(self):
        g = WeightedGraph.from_edges(1, [])
        out = solve_component(g, shortest_paths(g), [0], 1, 0.0, CFG)
        assert len(out) == 1 and out[0].cost == 0

    def test_unit_path(self, path4):
        out = solve_component(path4, shortest_paths(path4), range(4), 2, 1.0, CFG)
        assert sorted((sorted(t.cover), t.cost) for t in out) == [([0, 1], 1.0), ([2, 3], 1.0)]

    def test_tree_count_at_most_padded_total_over_lambda(self):
        rng = random.Random(10)
        for _ in range(30):
            n = rng.randint(1, 25)
            lam = rng.randint(1, 8)
            g = random_connected_graph(rng, n, wmax=2.0)
            trace = Trace()
            t_star = max(w for _, _, w in g.edges) if g.edges else 0.0
            out = solve_component(g, shortest_paths(g), range(n), lam, t_star, CFG, trace)
            assert sorted(v for t in out for v in t.cover) == list(range(n))
            assert all(t.size <= lam for t in out)
            assert all(t.cost <= CFG.bound * t_star + 1e-9 for t in out)
            rec = trace.runs[0]
            padded = n + ceil(lam / 2) * rec.v_bad
            assert len(out) <= ceil(padded / lam)


class TestSearchSolve:
    def test_singletons(self, path4):
        sol = search_solve(Instance(path4, 4, 1))
        assert sol.makespan == 0 and sol.t_star == 0 and len(sol.trees) == 4

    def test_unit_path_within_bound(self, path4):
        sol = search_solve(Instance(path4, 2, 2))
        assert sol.makespan <= CFG.bound * (1 + CFG.epsilon) * 1.0
        assert check_solution(Instance(path4, 2, 2), sol).ok

    def test_single_tree_against_steiner(self):
        g = random_connected_graph(random.Random(13), 8)
        mc = shortest_paths(g)
        opt = exact_steiner(SteinerRequest(g, mc, frozenset(range(8)), 8)).cost
        sol = search_solve(Instance(g, 1, 8))
        assert len(sol.trees) == 1
        assert opt - 1e-9 <= sol.makespan <= CFG.bound * (1 + CFG.epsilon) * opt

    def test_infeasible(self, path4):
        with pytest.raises(Infeasible):
            search_solve(Instance(path4, 1, 3))

    def test_disconnected_graph(self):
        g = WeightedGraph.from_edges(4, [(0, 1, 1), (2, 3, 1)])
        sol = search_solve(Instance(g, 2, 2))
        assert check_solution(Instance(g, 2, 2), sol).ok and sol.makespan == 1
