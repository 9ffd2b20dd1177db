"""
Core graph and metric types.

Holds the weighted-graph and metric-space containers, the ordered terminal
set, and the shortest-path primitives every engine builds on:
single-source Dijkstra, the multi-source terminal distance D(v), and the
shortest-path metric of a graph.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from relaxed_voronoi.config import DISTANCE_TOLERANCE, INF, TRIANGLE_CHECK_LIMIT
from relaxed_voronoi.errors import InputError

Edge = tuple[int, int, float]


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class WeightedGraph:
    """
    Undirected graph with non-negative edge weights on vertices 0..n-1.

    The adjacency lists are derived from ``edges`` on construction and must be
    treated as read-only.
    """

    n: int
    edges: tuple[Edge, ...]
    adjacency: list[list[tuple[int, float]]] = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[Sequence[float]]):
        if n < 1:
            raise InputError(f"graph needs at least one vertex, got n={n}")

        normalized: list[Edge] = []
        adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for raw in edges:
            u, v, w = int(raw[0]), int(raw[1]), float(raw[2])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has a vertex id outside [0, {n})")
            if u == v:
                raise InputError(f"self-loop on vertex {u}")
            if not (w >= 0.0 and math.isfinite(w)):
                raise InputError(f"edge ({u}, {v}) has negative or non-finite weight {w}")
            normalized.append((u, v, w))
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))

        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", adjacency)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def is_connected(self) -> bool:
        """True if every vertex is reachable from vertex 0."""
        seen = bytearray(self.n)
        seen[0] = 1
        queue = deque([0])
        reached = 1
        while queue:
            u = queue.popleft()
            for v, _ in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = 1
                    reached += 1
                    queue.append(v)
        return reached == self.n

    @property
    def is_tree(self) -> bool:
        return self.m == self.n - 1 and self.is_connected

    def require_connected(self) -> None:
        """Raise InputError if the graph is disconnected."""
        if not self.is_connected:
            raise InputError("graph is disconnected; the engines require a connected input")

    def neighbors(self, v: int) -> Iterator[int]:
        return (u for u, _ in self.adjacency[v])


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """
    Dense pairwise-distance view over n points.

    The matrix is copied and frozen on construction. The triangle inequality
    is checked when ``validate`` is true, or by default when n is at most
    ``TRIANGLE_CHECK_LIMIT``.
    """

    dist: np.ndarray = field(repr=False)

    def __init__(self, dist: np.ndarray | Sequence[Sequence[float]], validate: Optional[bool] = None):
        matrix = np.array(dist, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InputError(f"distance matrix must be square and non-empty, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InputError("distance matrix contains infinite or NaN entries")
        if np.any(matrix < 0):
            raise InputError("distance matrix contains negative entries")
        if np.any(np.diag(matrix) != 0):
            raise InputError("distance matrix must have a zero diagonal")
        if not np.array_equal(matrix, matrix.T):
            raise InputError("distance matrix must be symmetric")

        check = validate if validate is not None else matrix.shape[0] <= TRIANGLE_CHECK_LIMIT
        if check:
            _check_triangle_inequality(matrix)

        matrix.setflags(write=False)
        object.__setattr__(self, "dist", matrix)

    @property
    def n(self) -> int:
        return int(self.dist.shape[0])

    def submetric(self, points: Sequence[int]) -> MetricSpace:
        """Restrict the metric to ``points`` (re-indexed 0..len-1 in the given order)."""
        ids = np.asarray(points, dtype=np.int64)
        return MetricSpace(self.dist[np.ix_(ids, ids)], validate=False)


def _check_triangle_inequality(matrix: np.ndarray) -> None:
    for z in range(matrix.shape[0]):
        through_z = matrix[:, z, None] + matrix[None, z, :]
        if np.any(matrix > through_z + DISTANCE_TOLERANCE):
            x, y = np.argwhere(matrix > through_z + DISTANCE_TOLERANCE)[0]
            raise InputError(
                f"triangle inequality fails: d({x},{y})={matrix[x, y]} > "
                f"d({x},{z})+d({z},{y})={through_z[x, y]}"
            )


@dataclass(frozen=True)
class TerminalSet:
    """Ordered, duplicate-free terminal ids; the order is the ordering pi."""

    terminals: tuple[int, ...]

    def __init__(self, terminals: Iterable[int]):
        ids = tuple(int(t) for t in terminals)
        if not ids:
            raise InputError("terminal set is empty (no terminals)")
        if len(set(ids)) != len(ids):
            raise InputError(f"terminal ids must be distinct, got {list(ids)}")
        if min(ids) < 0:
            raise InputError(f"negative terminal id in {list(ids)}")
        object.__setattr__(self, "terminals", ids)

    @property
    def k(self) -> int:
        return len(self.terminals)

    def __len__(self) -> int:
        return len(self.terminals)

    def __iter__(self) -> Iterator[int]:
        return iter(self.terminals)

    def __getitem__(self, i: int) -> int:
        return self.terminals[i]

    def __contains__(self, x: object) -> bool:
        return x in self.position

    @cached_property
    def position(self) -> dict[int, int]:
        """Terminal id -> index in the ordering."""
        return {t: i for i, t in enumerate(self.terminals)}

    def check_within(self, n: int) -> None:
        """Raise InputError if a terminal id is not a valid point/vertex id."""
        bad = [t for t in self.terminals if t >= n]
        if bad:
            raise InputError(f"terminal ids {bad} outside [0, {n})")

    def reordered(self, order: Iterable[int]) -> TerminalSet:
        """Return a new set with the same elements in ``order``."""
        result = TerminalSet(order)
        if set(result.terminals) != set(self.terminals):
            raise InputError("reordering must be a permutation of the terminal set")
        return result


@dataclass(frozen=True)
class TerminalInstance:
    """A graph or a metric together with its terminal set."""

    terminals: TerminalSet
    graph: Optional[WeightedGraph] = None
    metric: Optional[MetricSpace] = None

    def __post_init__(self) -> None:
        if (self.graph is None) == (self.metric is None):
            raise InputError("an instance holds exactly one of a graph or a metric")
        self.terminals.check_within(self.n)

    @property
    def n(self) -> int:
        if self.graph is not None:
            return self.graph.n
        assert self.metric is not None
        return self.metric.n


# =============================================================================
# SHORTEST PATHS
# =============================================================================

def _dijkstra(g: WeightedGraph, sources: Iterable[int]) -> list[float]:
    dist = [INF] * g.n
    heap: list[tuple[float, int]] = []
    for s in sources:
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)

    adjacency = g.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adjacency[u]:
            candidate = d + w
            if candidate < dist[v]:
                dist[v] = candidate
                heapq.heappush(heap, (candidate, v))
    return dist


def shortest_paths_from(g: WeightedGraph, source: int) -> np.ndarray:
    """
    Exact single-source shortest-path distances.

    Args:
        g: Graph with non-negative weights.
        source: Source vertex id.

    Returns:
        Array of length n; unreachable vertices hold ``INF``.

    Raises:
        InputError: If the source id is invalid.
    """
    if not 0 <= source < g.n:
        raise InputError(f"source {source} outside [0, {g.n})")
    return np.asarray(_dijkstra(g, (source,)), dtype=np.float64)


def terminal_distances(g: WeightedGraph, terminals: TerminalSet) -> np.ndarray:
    """
    D(v) = min over terminals t of d_G(v, t), via one multi-source run.

    Args:
        g: Graph with non-negative weights.
        terminals: Non-empty terminal set.

    Returns:
        Array of length n.
    """
    terminals.check_within(g.n)
    return np.asarray(_dijkstra(g, terminals), dtype=np.float64)


def metric_from_graph(g: WeightedGraph) -> MetricSpace:
    """
    Shortest-path metric of a connected graph (one Dijkstra run per vertex).

    Raises:
        InputError: If the graph is disconnected.
    """
    g.require_connected()
    rows = [_dijkstra(g, (s,)) for s in range(g.n)]
    matrix = np.asarray(rows, dtype=np.float64)
    # Row s is summed outward from s; symmetrize so the matrix is exactly symmetric.
    matrix = np.minimum(matrix, matrix.T)
    return MetricSpace(matrix)
