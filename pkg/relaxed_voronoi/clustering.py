"""
Relaxed-Voronoi clustering engines.

Two engines share one rule: terminals take turns in pi order, and terminal
t_j claims an unclaimed point x when d(t_j, x) <= R_j * D(x).

- ``metric_relaxed_voronoi`` applies the rule to every unclaimed point of a
  metric and returns a retraction.
- ``graphic_relaxed_voronoi`` grows each cluster from its terminal through
  accepted vertices only, so every cluster induces a connected subgraph.

Also here: the plain Voronoi baseline, partition validation, and minor
induction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence

import numpy as np

from relaxed_voronoi.config import should_validate
from relaxed_voronoi.errors import InputError, InvariantViolation
from relaxed_voronoi.graph import (
    MetricSpace,
    TerminalSet,
    WeightedGraph,
    _dijkstra,
    terminal_distances,
)
from relaxed_voronoi.logger import get_logger
from relaxed_voronoi.magnitudes import MagnitudeVector

logger = get_logger(__name__)

Frontier = Literal["fifo", "lifo"]


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True, eq=False)
class Retraction:
    """assignment[x] is the terminal id x is mapped to; terminals map to themselves."""

    assignment: np.ndarray

    def __post_init__(self) -> None:
        self.assignment.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.assignment.shape[0])

    def __getitem__(self, x: int) -> int:
        return int(self.assignment[x])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Retraction):
            return NotImplemented
        return bool(np.array_equal(self.assignment, other.assignment))

    def preimage(self, terminal: int) -> set[int]:
        """f^{-1}(terminal)."""
        return set(np.flatnonzero(self.assignment == terminal).tolist())

    def validate(self, terminals: TerminalSet) -> None:
        """Check totality and f(t) = t."""
        if np.any(self.assignment < 0):
            missing = np.flatnonzero(self.assignment < 0)[:10].tolist()
            raise InvariantViolation("retraction-total", f"unmapped points {missing}")
        for t in terminals:
            if self.assignment[t] != t:
                raise InvariantViolation(
                    "retraction-fixes-terminals", f"terminal {t} mapped to {self.assignment[t]}"
                )


@dataclass(frozen=True, eq=False)
class TerminalPartition:
    """
    Clusters V_1..V_k in pi order plus the inverse map.

    ``clusters[i]`` is sorted and contains ``terminals[i]``; ``owner[v]`` is the
    index i of the cluster holding v.
    """

    terminals: TerminalSet
    clusters: tuple[tuple[int, ...], ...]
    owner: np.ndarray

    def __post_init__(self) -> None:
        self.owner.setflags(write=False)

    @classmethod
    def from_owner(cls, terminals: TerminalSet, owner: Sequence[int] | np.ndarray) -> TerminalPartition:
        """Build a partition from a vertex -> cluster-index map."""
        owner_array = np.asarray(owner, dtype=np.int64).copy()
        k = terminals.k
        if owner_array.size and (owner_array.min() < 0 or owner_array.max() >= k):
            raise InvariantViolation("cover", "some vertex has no cluster index in [0, k)")
        order = np.argsort(owner_array, kind="stable")
        bounds = np.searchsorted(owner_array[order], np.arange(k + 1)).tolist()
        members = order.tolist()
        clusters = tuple(tuple(members[bounds[i]:bounds[i + 1]]) for i in range(k))
        return cls(terminals, clusters, owner_array)

    @classmethod
    def from_assignment(cls, terminals: TerminalSet, assignment: Sequence[int] | np.ndarray) -> TerminalPartition:
        """Build a partition from a vertex -> terminal-id map."""
        position = terminals.position
        try:
            owner = [position[int(t)] for t in assignment]
        except KeyError as e:
            raise InvariantViolation("cover", f"vertex mapped to non-terminal {e.args[0]}") from e
        return cls.from_owner(terminals, owner)

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def n(self) -> int:
        return int(self.owner.shape[0])

    def cluster_of(self, terminal: int) -> tuple[int, ...]:
        return self.clusters[self.terminals.position[terminal]]

    def to_retraction(self) -> Retraction:
        ids = np.asarray(self.terminals.terminals, dtype=np.int64)
        return Retraction(ids[self.owner])

    def same_clusters(self, other: TerminalPartition) -> bool:
        """Equal as maps terminal -> vertex set, independent of ordering."""
        if set(self.terminals) != set(other.terminals):
            return False
        return all(
            set(self.cluster_of(t)) == set(other.cluster_of(t)) for t in self.terminals
        )


@dataclass(frozen=True)
class InducedMinor:
    """
    Contraction of a terminal partition; vertex i stands for ``terminals[i]``.

    Edge (i, j, w) with i < j exists iff some original edge joins V_i and V_j,
    and w = d_G(t_i, t_j).
    """

    terminals: TerminalSet
    edges: tuple[tuple[int, int, float], ...]

    @property
    def k(self) -> int:
        return self.terminals.k

    def as_graph(self) -> WeightedGraph:
        return WeightedGraph(self.k, self.edges)

    def distance_matrix(self) -> np.ndarray:
        """All-pairs d_M over minor vertex indices (k Dijkstra runs on the minor)."""
        graph = self.as_graph()
        return np.asarray([_dijkstra(graph, (i,)) for i in range(self.k)], dtype=np.float64)


# =============================================================================
# SHARED PRECOMPUTATION
# =============================================================================

def terminal_distance_rows(g: WeightedGraph, terminals: TerminalSet) -> dict[int, np.ndarray]:
    """
    d_G(., t) for every terminal t, one single-source run each.

    Randomized callers compute this once per instance and pass it to every
    engine run.
    """
    terminals.check_within(g.n)
    return {t: np.asarray(_dijkstra(g, (t,)), dtype=np.float64) for t in terminals}


def _check_magnitudes(terminals: TerminalSet, magnitudes: MagnitudeVector) -> None:
    if len(magnitudes) != terminals.k:
        raise InputError(f"got {len(magnitudes)} magnitudes for {terminals.k} terminals")


# =============================================================================
# METRIC ENGINE
# =============================================================================

def metric_relaxed_voronoi(
    metric: MetricSpace,
    terminals: TerminalSet,
    magnitudes: MagnitudeVector,
) -> Retraction:
    """
    Sequential enlarged-Voronoi retraction of a metric.

    For j = 1..k in pi order, every still-unmapped x with
    d(t_j, x) <= R_j * D(x) is mapped to t_j. Terminals are fixed to
    themselves up front.

    Args:
        metric: The metric space.
        terminals: Terminals in pi order.
        magnitudes: R_1..R_k aligned with ``terminals``.

    Returns:
        A total retraction.
    """
    terminals.check_within(metric.n)
    _check_magnitudes(terminals, magnitudes)

    ids = np.asarray(terminals.terminals, dtype=np.int64)
    nearest = metric.dist[:, ids].min(axis=1)

    assignment = np.full(metric.n, -1, dtype=np.int64)
    assignment[ids] = ids
    for j, t in enumerate(ids):
        claim = (assignment < 0) & (metric.dist[t] <= magnitudes[j] * nearest)
        assignment[claim] = t

    retraction = Retraction(assignment)
    retraction.validate(terminals)
    logger.debug(f"metric engine: n={metric.n}, k={terminals.k}")
    return retraction


def voronoi_baseline(metric: MetricSpace, terminals: TerminalSet) -> Retraction:
    """Map every point to its nearest terminal, earliest in pi on ties."""
    terminals.check_within(metric.n)
    ids = np.asarray(terminals.terminals, dtype=np.int64)
    # argmin returns the first minimum, i.e. the earliest terminal in pi
    assignment = ids[np.argmin(metric.dist[:, ids], axis=1)]
    assignment[ids] = ids
    return Retraction(assignment)


# =============================================================================
# GRAPHIC ENGINE
# =============================================================================

def create_cluster(
    g: WeightedGraph,
    unclustered: set[int],
    terminal: int,
    magnitude: float,
    nearest: Sequence[float] | np.ndarray,
    from_terminal: Sequence[float] | np.ndarray,
    frontier: Frontier = "fifo",
) -> set[int]:
    """
    Grow the cluster of one terminal.

    A frontier vertex v is accepted iff d_G(v, t_j) <= R_j * D(v); rejected
    vertices are never revisited, and only neighbors of accepted vertices
    enter the frontier, so the cluster is connected by construction.

    Args:
        g: The graph.
        unclustered: Vertices not yet in any cluster (terminals excluded).
        terminal: t_j.
        magnitude: R_j.
        nearest: D(v) for every vertex.
        from_terminal: d_G(v, t_j) for every vertex.
        frontier: Pop discipline; membership does not depend on it.

    Returns:
        The cluster V_j (contains ``terminal``).
    """
    cluster = {terminal}
    # Everything that has ever been in the frontier: accepted or rejected
    seen = {terminal}
    pending: deque[int] = deque()
    for v in g.neighbors(terminal):
        if v in unclustered and v not in seen:
            seen.add(v)
            pending.append(v)

    pop = pending.popleft if frontier == "fifo" else pending.pop
    while pending:
        v = pop()
        if from_terminal[v] <= magnitude * nearest[v]:
            cluster.add(v)
            for u in g.neighbors(v):
                if u in unclustered and u not in seen:
                    seen.add(u)
                    pending.append(u)

    return cluster


def graphic_relaxed_voronoi(
    g: WeightedGraph,
    terminals: TerminalSet,
    magnitudes: MagnitudeVector,
    *,
    rows: Optional[Mapping[int, np.ndarray]] = None,
    nearest: Optional[np.ndarray] = None,
    frontier: Frontier = "fifo",
    validate: Optional[bool] = None,
) -> TerminalPartition:
    """
    Connected enlarged-Voronoi terminal partition of a graph.

    Args:
        g: Connected graph.
        terminals: Terminals in pi order.
        magnitudes: R_1..R_k aligned with ``terminals``.
        rows: Optional precomputed ``terminal_distance_rows``.
        nearest: Optional precomputed ``terminal_distances``.
        frontier: Pop discipline for cluster growth.
        validate: Override of the RV_VALIDATE level.

    Returns:
        The terminal partition, clusters in pi order.
    """
    g.require_connected()
    terminals.check_within(g.n)
    _check_magnitudes(terminals, magnitudes)

    if nearest is None:
        nearest = terminal_distances(g, terminals)
    if rows is None:
        rows = terminal_distance_rows(g, terminals)
    nearest_list = nearest.tolist()

    owner = [-1] * g.n
    for i, t in enumerate(terminals):
        owner[t] = i
    unclustered = set(range(g.n)).difference(terminals)

    for j, t in enumerate(terminals):
        cluster = create_cluster(
            g, unclustered, t, magnitudes[j], nearest_list, rows[t].tolist(), frontier
        )
        cluster.discard(t)
        unclustered.difference_update(cluster)
        for v in cluster:
            owner[v] = j

    partition = TerminalPartition.from_owner(terminals, owner)
    if should_validate(validate):
        validate_partition(g, terminals, partition)
    logger.debug(
        f"graphic engine: n={g.n}, k={terminals.k}, "
        f"largest cluster={max(len(c) for c in partition.clusters)}"
    )
    return partition


# =============================================================================
# VALIDATION & MINORS
# =============================================================================

def _violation(invariant: str, detail: str) -> InvariantViolation:
    logger.error(f"partition check failed: {invariant}: {detail}")
    return InvariantViolation(invariant, detail)


def validate_partition(g: WeightedGraph, terminals: TerminalSet, partition: TerminalPartition) -> None:
    """
    Check that ``partition`` is a terminal partition of (g, terminals).

    Raises:
        InvariantViolation: Naming the first failed property (cover,
            disjoint, terminal-containing, connected).
    """
    if partition.terminals.terminals != terminals.terminals:
        raise _violation(
            "terminal-containing",
            f"partition is over terminals {list(partition.terminals)}, expected {list(terminals)}",
        )
    if partition.n != g.n:
        raise _violation("cover", f"owner map has {partition.n} entries for {g.n} vertices")

    seen = np.zeros(g.n, dtype=np.int64)
    for members in partition.clusters:
        np.add.at(seen, np.asarray(members, dtype=np.int64), 1)
    if np.any(seen == 0):
        raise _violation("cover", f"vertices {np.flatnonzero(seen == 0)[:10].tolist()} in no cluster")
    if np.any(seen > 1):
        raise _violation("disjoint", f"vertices {np.flatnonzero(seen > 1)[:10].tolist()} in several clusters")

    for t, members in zip(partition.terminals, partition.clusters):
        member_set = set(members)
        if t not in member_set:
            raise _violation("terminal-containing", f"cluster of terminal {t} does not contain it")

        # BFS inside G[V_i] from t
        reached = {t}
        queue = deque([t])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if v in member_set and v not in reached:
                    reached.add(v)
                    queue.append(v)
        if len(reached) != len(members):
            raise _violation(
                "connected", f"cluster of terminal {t} has {len(members) - len(reached)} unreachable vertices"
            )


def induce_minor(
    g: WeightedGraph,
    terminals: TerminalSet,
    partition: TerminalPartition,
    rows: Optional[Mapping[int, np.ndarray]] = None,
) -> InducedMinor:
    """
    Contract every cluster into its terminal.

    Minor edge weights are original terminal distances d_G(t_i, t_j), not the
    weight of the crossing edge.

    Raises:
        InvariantViolation: If the partition is not a terminal partition of g.
    """
    validate_partition(g, terminals, partition)
    if rows is None:
        rows = terminal_distance_rows(g, terminals)

    owner = partition.owner
    pairs: set[tuple[int, int]] = set()
    for u, v, _ in g.edges:
        a, b = int(owner[u]), int(owner[v])
        if a != b:
            pairs.add((a, b) if a < b else (b, a))

    edges = tuple(
        (i, j, float(rows[terminals[i]][terminals[j]])) for i, j in sorted(pairs)
    )
    return InducedMinor(terminals, edges)


def partition_payload(partition: TerminalPartition, minor: InducedMinor) -> dict:
    """JSON-ready ``{"clusters": [...], "minor": {"edges": [...]}}``."""
    return {
        "clusters": [list(c) for c in partition.clusters],
        "minor": {"edges": [[i, j, w] for i, j, w in minor.edges]},
    }
