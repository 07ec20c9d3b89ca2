import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from brute import simple_path_distance
from conftest import random_connected_graph
from capcover.graph import (
    Tree,
    WeightedGraph,
    components,
    join_trees,
    prune_edges,
    shortest_paths,
    spanning_tree,
    tree_distance,
    trim_tree,
    trivial_tree,
)


def tree_on(vertices):
    return Tree(frozenset(vertices), (), 0.0)


class TestWeightedGraph:
    def test_parallel_edges_collapse_to_minimum(self):
        g = WeightedGraph.from_edges(2, [(0, 1, 5), (1, 0, 2)])
        assert g.edges == [(0, 1, 2.0)]

    @pytest.mark.parametrize("edge", [(0, 0, 1), (0, 3, 1), (0, 1, -1), (0, 1, math.inf)])
    def test_rejects_invalid_edges(self, edge):
        with pytest.raises(ValueError):
            WeightedGraph.from_edges(3, [edge])


class TestShortestPaths:
    def test_triangle_takes_two_hop_route(self):
        # a=0, b=1, c=2; direct a-c is 4, via b is 3
        g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 2), (0, 2, 4)])
        mc = shortest_paths(g)
        assert mc.d(0, 2) == pytest.approx(3.0)
        assert mc.path(0, 2) == [0, 1, 2]

    def test_single_vertex(self):
        assert shortest_paths(WeightedGraph.from_edges(1, [])).d(0, 0) == 0

    def test_disconnected_pair_is_infinite(self):
        mc = shortest_paths(WeightedGraph.from_edges(2, []))
        assert mc.d(0, 1) == math.inf

    def test_agrees_with_simple_path_enumeration(self):
        rng = random.Random(11)
        for _ in range(60):
            n = rng.randint(2, 8)
            g = random_connected_graph(rng, n, extra=0.4)
            mc = shortest_paths(g)
            for s in range(n):
                for t in range(n):
                    assert mc.d(s, t) == pytest.approx(simple_path_distance(n, g.edges, s, t), abs=1e-9)

    def test_reconstructed_paths_match_distances(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(2, 50)
            g = random_connected_graph(rng, n, extra=0.05)
            mc = shortest_paths(g)
            for _ in range(10):
                s, t = rng.randrange(n), rng.randrange(n)
                length = sum(g.length(u, v) for u, v in mc.path_edges(s, t))
                assert length == pytest.approx(mc.d(s, t), abs=1e-9)

    def test_triangle_inequality_and_symmetry(self):
        g = random_connected_graph(random.Random(5), 30, extra=0.1)
        d = shortest_paths(g).dist
        assert np.allclose(d, d.T)
        assert np.all(d[:, :, None] <= d[:, None, :] + d.T[None, :, :] + 1e-9)


class TestPrune:
    def test_filters_long_edges(self):
        g = WeightedGraph.from_edges(4, [(0, 1, 1), (1, 2, 2), (2, 3, 5)])
        p = prune_edges(g, 2)
        assert sorted(w for _, _, w in p.edges) == [1, 2]
        assert p.n == 4

    def test_zero_guess_leaves_no_positive_edges(self):
        g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 2)])
        assert prune_edges(g, 0).edges == []

    def test_large_guess_is_identity(self):
        g = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 2)])
        assert prune_edges(g, 2).edges == g.edges


class TestComponents:
    def test_path_is_one_component(self):
        assert components(WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])) == [[0, 1, 2]]

    def test_edgeless_graph(self):
        assert components(WeightedGraph.from_edges(3, [])) == [[0], [1], [2]]

    def test_two_disjoint_edges(self):
        assert components(WeightedGraph.from_edges(4, [(0, 2, 1), (1, 3, 1)])) == [[0, 2], [1, 3]]

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=20))
    def test_output_is_a_partition(self, n, pairs):
        edges = [(u, v, 1.0) for u, v in pairs if u < n and v < n and u != v]
        comps = components(WeightedGraph.from_edges(n, edges))
        flat = [v for c in comps for v in c]
        assert sorted(flat) == list(range(n))
        assert [c[0] for c in comps] == sorted(c[0] for c in comps)


class TestTreeDistance:
    def setup_method(self):
        # 0 -3- 1, and a path 2 -1- 3 -1- 4 -1- 5 with 3 close to 4
        self.mc = shortest_paths(WeightedGraph.from_edges(6, [(0, 1, 3), (2, 3, 1), (3, 4, 1), (4, 5, 1)]))

    def test_singletons(self):
        assert tree_distance(trivial_tree(0), trivial_tree(1), self.mc) == (3.0, (0, 1))

    def test_shared_vertex(self):
        assert tree_distance(tree_on({2, 3}), tree_on({3, 4}), self.mc) == (0.0, (3, 3))

    def test_closest_of_four_pairs(self):
        assert tree_distance(tree_on({2, 3}), tree_on({4, 5}), self.mc) == (1.0, (3, 4))

    def test_symmetric(self):
        rng = random.Random(1)
        g = random_connected_graph(rng, 12)
        mc = shortest_paths(g)
        for _ in range(50):
            a = tree_on(rng.sample(range(12), rng.randint(1, 4)))
            b = tree_on(rng.sample(range(12), rng.randint(1, 4)))
            assert tree_distance(a, b, mc)[0] == tree_distance(b, a, mc)[0]


class TestTreeOps:
    def test_join_and_trim(self, path4):
        mc = shortest_paths(path4)
        joined = join_trees(path4, mc, [trivial_tree(0), trivial_tree(3)])
        assert joined.cost == 3 and joined.vertices == frozenset(range(4))
        assert trim_tree(path4, joined, {0, 1}).edges == ((0, 1),)

    def test_spanning_tree_rejects_disconnected(self):
        g = WeightedGraph.from_edges(3, [(0, 1, 1)])
        with pytest.raises(ValueError):
            spanning_tree(g, [(0, 1)], [2])
