import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaxed_voronoi.errors import InputError
from relaxed_voronoi.graph import MetricSpace, TerminalSet, WeightedGraph, shortest_paths_from
from relaxed_voronoi.orderings import (
    OrderingPolicy,
    gonzalez_order,
    insertion_radii,
    order_terminals,
    root_distance_order,
)

from .conftest import euclidean_metric, random_points
from .strategies import trees


def brute_force_gonzalez(dist: np.ndarray, terminals: list[int], start: int) -> list[int]:
    order = [start]
    remaining = set(terminals) - {start}
    while remaining:
        best = max(remaining, key=lambda t: (min(dist[t][s] for s in order), -t))
        order.append(best)
        remaining.remove(best)
    return order


class TestRootDistance:
    def test_path(self, path_graph):
        assert list(root_distance_order(path_graph, TerminalSet([3, 1]), root=0)) == [1, 3]

    def test_root_terminal_comes_first(self, star_graph):
        assert list(root_distance_order(star_graph, TerminalSet([2, 1, 0]), root=0)) == [0, 1, 2]

    def test_ties_go_to_lower_id(self, star_graph):
        assert list(root_distance_order(star_graph, TerminalSet([3, 2, 1]), root=0)) == [1, 2, 3]

    @given(trees(min_n=2), st.data())
    def test_sorted_by_root_distance(self, g, data):
        root = data.draw(st.integers(0, g.n - 1))
        ids = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, unique=True))
        order = list(root_distance_order(g, TerminalSet(ids), root))
        from_root = shortest_paths_from(g, root)
        keys = [(from_root[t], t) for t in order]
        assert keys == sorted(keys)


class TestGonzalez:
    def test_collinear(self):
        # points at coordinates 0, 3, 10
        metric = MetricSpace([[0, 3, 10], [3, 0, 7], [10, 7, 0]])
        order = gonzalez_order(metric, TerminalSet([0, 1, 2]), start=0)
        assert list(order) == [0, 2, 1]

    def test_single_terminal(self):
        metric = MetricSpace([[0, 1], [1, 0]])
        assert list(gonzalez_order(metric, TerminalSet([1]))) == [1]

    def test_default_start_is_lowest_id(self):
        metric = MetricSpace([[0, 3, 10], [3, 0, 7], [10, 7, 0]])
        assert gonzalez_order(metric, TerminalSet([2, 1]))[0] == 1

    def test_start_must_be_terminal(self):
        metric = MetricSpace([[0, 1], [1, 0]])
        with pytest.raises(InputError):
            gonzalez_order(metric, TerminalSet([1]), start=0)

    def test_ties_go_to_lower_id(self):
        # 0 at the center, 1..3 all at distance 1 from it and 2 from each other
        dist = np.full((4, 4), 2.0)
        dist[0, :] = dist[:, 0] = 1.0
        np.fill_diagonal(dist, 0.0)
        assert list(gonzalez_order(MetricSpace(dist), TerminalSet([3, 2, 1, 0]), start=0)) == [0, 1, 2, 3]

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_brute_force_in_the_plane(self, seed):
        metric = euclidean_metric(random_points(20, seed))
        terminals = np.random.default_rng(seed + 100).choice(20, size=8, replace=False).tolist()
        start = min(terminals)
        order = gonzalez_order(metric, TerminalSet(terminals))
        assert list(order) == brute_force_gonzalez(metric.dist, terminals, start)

    @pytest.mark.parametrize("seed", range(10))
    def test_insertion_radii_do_not_increase(self, seed):
        metric = euclidean_metric(random_points(30, seed))
        order = gonzalez_order(metric, TerminalSet(range(30)))
        radii = insertion_radii(metric, order)
        assert len(radii) == 29
        assert all(a >= b for a, b in zip(radii, radii[1:]))


class TestPolicies:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("given", OrderingPolicy.given()),
            ("root:4", OrderingPolicy.root_distance(4)),
            ("gonzalez", OrderingPolicy.gonzalez()),
            ("gonzalez:2", OrderingPolicy.gonzalez(2)),
        ],
    )
    def test_parse(self, text, expected):
        policy = OrderingPolicy.parse(text)
        assert policy == expected
        assert str(policy) == text

    @pytest.mark.parametrize("text", ["root", "root:x", "random", "given:1"])
    def test_parse_rejects(self, text):
        with pytest.raises(InputError):
            OrderingPolicy.parse(text)

    def test_given_keeps_order(self, path_graph):
        terminals = TerminalSet([3, 0])
        assert order_terminals(OrderingPolicy.given(), terminals, graph=path_graph) is terminals

    def test_root_needs_graph(self):
        metric = MetricSpace([[0, 1], [1, 0]])
        with pytest.raises(InputError):
            order_terminals(OrderingPolicy.root_distance(0), TerminalSet([1]), metric=metric)

    def test_root_out_of_range(self, path_graph):
        with pytest.raises(InputError):
            order_terminals(OrderingPolicy.root_distance(9), TerminalSet([1]), graph=path_graph)

    def test_gonzalez_from_graph(self):
        g = WeightedGraph(3, [(0, 1, 3.0), (1, 2, 7.0)])
        assert list(order_terminals(OrderingPolicy.gonzalez(), TerminalSet([1, 0, 2]), graph=g)) == [0, 2, 1]
