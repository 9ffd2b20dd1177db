from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaxed_voronoi.clustering import (
    Retraction,
    TerminalPartition,
    create_cluster,
    graphic_relaxed_voronoi,
    induce_minor,
    metric_relaxed_voronoi,
    partition_payload,
    terminal_distance_rows,
    validate_partition,
    voronoi_baseline,
)
from relaxed_voronoi.errors import InputError, InvariantViolation
from relaxed_voronoi.evaluation import floyd_warshall
from relaxed_voronoi.generators import random_connected_graph, random_tree
from relaxed_voronoi.graph import MetricSpace, TerminalSet, WeightedGraph, terminal_distances
from relaxed_voronoi.magnitudes import MagnitudePolicy, MagnitudeVector, make_magnitudes

from .conftest import euclidean_metric, random_points
from .strategies import graph_instances, magnitude_lists

# =============================================================================
# REFERENCE IMPLEMENTATIONS
# =============================================================================


def enlarged_voronoi_by_loops(dist: np.ndarray, terminals: list[int], R: list[float]) -> list[int]:
    n = dist.shape[0]
    nearest = [min(dist[x][t] for t in terminals) for x in range(n)]
    f = {t: t for t in terminals}
    for j, t in enumerate(terminals):
        for x in range(n):
            if x not in f and dist[t][x] <= R[j] * nearest[x]:
                f[x] = t
    return [f[x] for x in range(n)]


def connected_voronoi_by_loops(g: WeightedGraph, terminals: list[int], R: list[float]) -> dict[int, set[int]]:
    dist = floyd_warshall(g)
    nearest = [min(dist[v][t] for t in terminals) for v in range(g.n)]
    unclustered = set(range(g.n)) - set(terminals)
    clusters = {}
    for j, t in enumerate(terminals):
        cluster, rejected = {t}, set()
        queue = [v for v in g.neighbors(t) if v in unclustered]
        while queue:
            v = queue.pop(0)
            if v in cluster or v in rejected:
                continue
            if dist[v][t] <= R[j] * nearest[v]:
                cluster.add(v)
                queue.extend(u for u in g.neighbors(v) if u in unclustered)
            else:
                rejected.add(v)
        unclustered -= cluster
        clusters[t] = cluster
    return clusters


def component_of_passing_vertices(g, unclustered, t, R, nearest, from_t) -> set[int]:
    passing = {v for v in unclustered if from_t[v] <= R * nearest[v]} | {t}
    reached, queue = {t}, deque([t])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v in passing and v not in reached:
                reached.add(v)
                queue.append(v)
    return reached


def const(value: float, k: int) -> MagnitudeVector:
    return MagnitudeVector.constant(value, k)


# =============================================================================
# METRIC ENGINE
# =============================================================================


class TestMetricEngine:
    def test_single_terminal_takes_everything(self):
        metric = euclidean_metric(random_points(10, 0))
        f = metric_relaxed_voronoi(metric, TerminalSet([4]), const(1.0, 1))
        assert f.assignment.tolist() == [4] * 10

    def test_terminals_map_to_themselves(self):
        metric = euclidean_metric(random_points(15, 1))
        terminals = TerminalSet([3, 7, 11])
        f = metric_relaxed_voronoi(metric, terminals, MagnitudeVector((50.0, 1.0, 1.0)))
        for t in terminals:
            assert f[t] == t

    def test_equidistant_point_goes_to_first_in_order(self):
        # points at 0 (terminal), 1, 2 (terminal) on a line
        metric = MetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        assert metric_relaxed_voronoi(metric, TerminalSet([0, 2]), const(1.0, 2))[1] == 0
        assert metric_relaxed_voronoi(metric, TerminalSet([2, 0]), const(1.0, 2))[1] == 2

    def test_unit_magnitudes_give_voronoi(self):
        for seed in range(200):
            rng = np.random.default_rng(seed)
            metric = euclidean_metric(rng.random((15, 2)))
            terminals = TerminalSet(rng.choice(15, size=int(rng.integers(1, 8)), replace=False).tolist())
            assert metric_relaxed_voronoi(metric, terminals, const(1.0, terminals.k)) == voronoi_baseline(
                metric, terminals
            )

    def test_voronoi_ties_go_to_first_in_order(self):
        metric = MetricSpace([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
        assert voronoi_baseline(metric, TerminalSet([2, 0]))[1] == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_loop_reference(self, seed):
        rng = np.random.default_rng(seed)
        metric = euclidean_metric(rng.random((15, 2)))
        terminals = rng.choice(15, size=4, replace=False).tolist()
        R = rng.uniform(1.0, 4.0, size=4).tolist()
        f = metric_relaxed_voronoi(metric, TerminalSet(terminals), MagnitudeVector(tuple(R)))
        assert f.assignment.tolist() == enlarged_voronoi_by_loops(metric.dist, terminals, R)

    @pytest.mark.parametrize("seed", range(20))
    def test_larger_first_magnitude_never_shrinks_its_region(self, seed):
        rng = np.random.default_rng(seed)
        metric = euclidean_metric(rng.random((25, 2)))
        terminals = TerminalSet(rng.choice(25, size=5, replace=False).tolist())
        rest = rng.uniform(1.0, 3.0, size=4).tolist()
        previous: set[int] = set()
        for first in (1.0, 1.5, 2.0, 4.0, 8.0):
            region = metric_relaxed_voronoi(metric, terminals, MagnitudeVector((first, *rest))).preimage(terminals[0])
            assert previous <= region
            previous = region

    def test_magnitude_count_must_match(self):
        metric = MetricSpace([[0, 1], [1, 0]])
        with pytest.raises(InputError):
            metric_relaxed_voronoi(metric, TerminalSet([0, 1]), const(1.0, 3))


class TestRetraction:
    def test_read_only_and_equality(self):
        f = Retraction(np.array([0, 0, 2]))
        assert f == Retraction(np.array([0, 0, 2]))
        assert f.preimage(0) == {0, 1}
        with pytest.raises(ValueError):
            f.assignment[0] = 2

    def test_validate(self):
        with pytest.raises(InvariantViolation) as e:
            Retraction(np.array([0, -1, 2])).validate(TerminalSet([0, 2]))
        assert e.value.invariant == "retraction-total"
        with pytest.raises(InvariantViolation) as e:
            Retraction(np.array([0, 0, 0])).validate(TerminalSet([0, 2]))
        assert e.value.invariant == "retraction-fixes-terminals"


# =============================================================================
# GRAPHIC ENGINE
# =============================================================================


class TestCreateCluster:
    def test_grows_along_a_path(self):
        # t=0 - a=1 - b=2 with unit weights, other terminal 3 at distance 10 past b
        g = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 10.0)])
        terminals = TerminalSet([0, 3])
        nearest = terminal_distances(g, terminals)
        rows = terminal_distance_rows(g, terminals)
        assert create_cluster(g, {1, 2}, 0, 3.0, nearest, rows[0]) == {0, 1, 2}

    def test_no_neighbor_passes(self):
        # a=1 sits next to terminal 2, far from terminal 0
        g = WeightedGraph(3, [(0, 1, 10.0), (1, 2, 1.0)])
        terminals = TerminalSet([0, 2])
        nearest = terminal_distances(g, terminals)
        rows = terminal_distance_rows(g, terminals)
        assert create_cluster(g, {1}, 0, 3.0, nearest, rows[0]) == {0}

    def test_passing_vertex_behind_a_rejected_one_stays_out(self):
        # 2 passes (2 <= 2 * 1.1) but is reachable only through 1, which fails (1 > 2 * 0.1)
        g = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (1, 3, 0.1)])
        terminals = TerminalSet([0, 3])
        nearest = terminal_distances(g, terminals)
        rows = terminal_distance_rows(g, terminals)
        assert rows[0][2] <= 2.0 * nearest[2]
        assert create_cluster(g, {1, 2}, 0, 2.0, nearest, rows[0]) == {0}

    @given(graph_instances(), st.data())
    def test_is_component_of_passing_vertices(self, instance, data):
        g, terminals = instance
        t = data.draw(st.sampled_from(list(terminals)))
        R = data.draw(st.floats(1.0, 6.0))
        frontier = data.draw(st.sampled_from(["fifo", "lifo"]))
        nearest = terminal_distances(g, terminals)
        from_t = terminal_distance_rows(g, terminals)[t]
        unclustered = set(range(g.n)) - set(terminals)
        cluster = create_cluster(g, unclustered, t, R, nearest, from_t, frontier)
        assert cluster == component_of_passing_vertices(g, unclustered, t, R, nearest, from_t)


class TestGraphicEngine:
    def test_every_vertex_a_terminal(self, path_graph):
        partition = graphic_relaxed_voronoi(path_graph, TerminalSet([2, 0, 3, 1]), const(5.0, 4))
        assert partition.clusters == ((2,), (0,), (3,), (1,))

    @pytest.mark.parametrize("order", [[1, 2, 3], [2, 3, 1], [3, 1, 2]])
    def test_star_center_joins_first_cluster(self, star_graph, order):
        partition = graphic_relaxed_voronoi(star_graph, TerminalSet(order), const(3.0, 3))
        assert partition.cluster_of(order[0]) == tuple(sorted((0, order[0])))

    def test_disconnected_graph_rejected(self):
        g = WeightedGraph(3, [(0, 1, 1.0)])
        with pytest.raises(InputError):
            graphic_relaxed_voronoi(g, TerminalSet([0]), const(1.0, 1))

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_loop_reference(self, seed):
        g = random_connected_graph(40, 70, seed=seed)
        rng = np.random.default_rng(seed)
        terminals = rng.choice(40, size=5, replace=False).tolist()
        R = rng.uniform(1.0, 5.0, size=5).tolist()
        partition = graphic_relaxed_voronoi(g, TerminalSet(terminals), MagnitudeVector(tuple(R)))
        expected = connected_voronoi_by_loops(g, terminals, R)
        for t in terminals:
            assert set(partition.cluster_of(t)) == expected[t]

    @given(graph_instances(), st.data())
    def test_output_is_a_terminal_partition(self, instance, data):
        g, terminals = instance
        R = data.draw(magnitude_lists(terminals.k))
        partition = graphic_relaxed_voronoi(g, terminals, MagnitudeVector(tuple(R)), validate=False)
        validate_partition(g, terminals, partition)

    @pytest.mark.slow
    def test_partition_holds_for_every_magnitude_policy(self):
        policies = [
            MagnitudePolicy.constant(3.0),
            MagnitudePolicy.doubling_exp(ddim=2.0),
            MagnitudePolicy.log_k_exp(),
        ]
        runs = 0
        for seed in range(120):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(2, 61))
            if seed % 2:
                g = random_tree(n, seed=seed)
            else:
                g = random_connected_graph(n, min(n * (n - 1) // 2, 2 * n), seed=seed)
            k = int(rng.integers(1, min(12, n) + 1))
            terminals = TerminalSet(rng.choice(n, size=k, replace=False).tolist())
            rows, nearest = terminal_distance_rows(g, terminals), terminal_distances(g, terminals)
            for policy in policies:
                for trial in range(30):
                    R = make_magnitudes(policy, k, seed=seed * 100 + trial)
                    partition = graphic_relaxed_voronoi(g, terminals, R, rows=rows, nearest=nearest, validate=False)
                    validate_partition(g, terminals, partition)
                    runs += 1
        assert runs >= 10_000

    @given(graph_instances(), st.data())
    def test_frontier_order_does_not_matter(self, instance, data):
        g, terminals = instance
        R = MagnitudeVector(tuple(data.draw(magnitude_lists(terminals.k))))
        fifo = graphic_relaxed_voronoi(g, terminals, R, frontier="fifo")
        lifo = graphic_relaxed_voronoi(g, terminals, R, frontier="lifo")
        assert fifo.clusters == lifo.clusters

    def test_frontier_order_on_seeded_corpus(self):
        for seed in range(200):
            g = random_connected_graph(30, 45, seed=seed)
            rng = np.random.default_rng(seed)
            terminals = TerminalSet(rng.choice(30, size=4, replace=False).tolist())
            R = MagnitudeVector(tuple(rng.uniform(1.0, 4.0, size=4).tolist()))
            fifo = graphic_relaxed_voronoi(g, terminals, R, frontier="fifo")
            lifo = graphic_relaxed_voronoi(g, terminals, R, frontier="lifo")
            assert fifo.clusters == lifo.clusters

    def test_precomputed_distances_give_same_result(self):
        g = random_connected_graph(30, 50, seed=3)
        terminals = TerminalSet([4, 17, 9])
        R = MagnitudeVector((2.0, 1.5, 3.0))
        plain = graphic_relaxed_voronoi(g, terminals, R)
        cached = graphic_relaxed_voronoi(
            g, terminals, R, rows=terminal_distance_rows(g, terminals), nearest=terminal_distances(g, terminals)
        )
        assert plain.clusters == cached.clusters


# =============================================================================
# PARTITIONS & MINORS
# =============================================================================


class TestValidatePartition:
    def test_accepts_valid(self, path_graph):
        terminals = TerminalSet([0, 3])
        validate_partition(path_graph, terminals, TerminalPartition.from_owner(terminals, [0, 0, 1, 1]))

    def test_disconnected_cluster(self, path_graph):
        terminals = TerminalSet([0, 2])
        partition = TerminalPartition.from_owner(terminals, [0, 1, 1, 0])
        with pytest.raises(InvariantViolation) as e:
            validate_partition(path_graph, terminals, partition)
        assert e.value.invariant == "connected"

    def test_terminal_outside_its_cluster(self, path_graph):
        terminals = TerminalSet([0, 3])
        partition = TerminalPartition.from_owner(terminals, [1, 1, 1, 1])
        with pytest.raises(InvariantViolation) as e:
            validate_partition(path_graph, terminals, partition)
        assert e.value.invariant == "terminal-containing"

    def test_overlapping_clusters(self, path_graph):
        terminals = TerminalSet([0, 3])
        partition = TerminalPartition(terminals, ((0, 1, 2), (2, 3)), np.array([0, 0, 0, 1]))
        with pytest.raises(InvariantViolation) as e:
            validate_partition(path_graph, terminals, partition)
        assert e.value.invariant == "disjoint"

    def test_uncovered_vertex(self, path_graph):
        terminals = TerminalSet([0, 3])
        partition = TerminalPartition(terminals, ((0, 1), (3,)), np.array([0, 0, 1, 1]))
        with pytest.raises(InvariantViolation) as e:
            validate_partition(path_graph, terminals, partition)
        assert e.value.invariant == "cover"

    def test_wrong_terminal_set(self, path_graph):
        partition = TerminalPartition.from_owner(TerminalSet([0, 3]), [0, 0, 1, 1])
        with pytest.raises(InvariantViolation):
            validate_partition(path_graph, TerminalSet([3, 0]), partition)

    def test_owner_out_of_range(self):
        with pytest.raises(InvariantViolation):
            TerminalPartition.from_owner(TerminalSet([0]), [0, 1])


class TestPartition:
    def test_from_assignment_and_back(self):
        terminals = TerminalSet([3, 0])
        partition = TerminalPartition.from_assignment(terminals, [0, 0, 3, 3])
        assert partition.clusters == ((2, 3), (0, 1))
        assert partition.to_retraction().assignment.tolist() == [0, 0, 3, 3]

    def test_same_clusters_ignores_order(self):
        a = TerminalPartition.from_assignment(TerminalSet([0, 3]), [0, 0, 3, 3])
        b = TerminalPartition.from_assignment(TerminalSet([3, 0]), [0, 0, 3, 3])
        assert a.same_clusters(b)
        c = TerminalPartition.from_assignment(TerminalSet([0, 3]), [0, 3, 3, 3])
        assert not a.same_clusters(c)

    def test_assignment_to_non_terminal(self):
        with pytest.raises(InvariantViolation):
            TerminalPartition.from_assignment(TerminalSet([0]), [0, 1])


class TestInduceMinor:
    def test_path_minor(self):
        # t1=0 - a=1 - t2=2, a joins the first cluster
        g = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        terminals = TerminalSet([0, 2])
        minor = induce_minor(g, terminals, TerminalPartition.from_owner(terminals, [0, 0, 1]))
        assert minor.edges == ((0, 1, 2.0),)
        assert minor.distance_matrix().tolist() == [[0.0, 2.0], [2.0, 0.0]]

    def test_single_terminal_has_no_edges(self, path_graph):
        terminals = TerminalSet([1])
        minor = induce_minor(path_graph, terminals, TerminalPartition.from_owner(terminals, [0] * 4))
        assert minor.edges == ()
        assert minor.k == 1

    def test_rejects_invalid_partition(self, path_graph):
        terminals = TerminalSet([0, 2])
        with pytest.raises(InvariantViolation):
            induce_minor(path_graph, terminals, TerminalPartition.from_owner(terminals, [0, 1, 1, 0]))

    def test_edges_follow_cluster_adjacency(self, star_graph):
        terminals = TerminalSet([1, 2, 3])
        partition = graphic_relaxed_voronoi(star_graph, terminals, const(3.0, 3))
        minor = induce_minor(star_graph, terminals, partition)
        # the center joins cluster 0, which then touches both other clusters
        assert [(i, j) for i, j, _ in minor.edges] == [(0, 1), (0, 2)]
        assert all(w == 2.0 for _, _, w in minor.edges)

    @pytest.mark.parametrize("seed", range(20))
    def test_minor_distances_dominate_tree_distances(self, seed):
        g = random_tree(40, seed=seed)
        rng = np.random.default_rng(seed)
        terminals = TerminalSet(rng.choice(40, size=8, replace=False).tolist())
        partition = graphic_relaxed_voronoi(g, terminals, const(3.0, 8))
        minor = induce_minor(g, terminals, partition)
        contracted = minor.distance_matrix()
        dist = floyd_warshall(g)
        ids = list(terminals)
        original = dist[np.ix_(ids, ids)]
        assert np.all(contracted >= original - 1e-9)

    def test_payload_shape(self):
        g = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        terminals = TerminalSet([0, 2])
        partition = TerminalPartition.from_owner(terminals, [0, 0, 1])
        payload = partition_payload(partition, induce_minor(g, terminals, partition))
        assert payload == {"clusters": [[0, 1], [2]], "minor": {"edges": [[0, 1, 2.0]]}}
