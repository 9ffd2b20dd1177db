"""
Linear-time tree specialization.

On a tree every path is unique, so three things get cheaper than on a general
graph:

- D(v) takes one upward and one downward sweep instead of a heap.
- Distances from the root take one top-down pass.
- Create-Cluster needs no rejected set and no per-terminal shortest-path
  run: d(v, t_j) = d(u, t_j) + w(u, v) for the accepted neighbor u that
  discovered v.

With terminals ordered by root distance, clustering also becomes a top-down
pass. Every cluster V_j has a top vertex, and when t_j's turn comes the whole
subtree under that top is unclaimed with t_j first among its terminals. So a
child v of a vertex in V_j either joins V_j (it passes the test, or t_j lies
below it) or tops the cluster of the first terminal in its own subtree.

Each pass runs level by level over the BFS order in numpy when the tree is
shallow, and as a per-vertex loop otherwise. Trees with zero-weight edges
always cluster through the frontier loop: a tie in root distance can put a
terminal ahead of its own ancestor terminal in pi, and the top-down rule
does not hold there.

``spr_tree`` chains these into Steiner point removal with constant
magnitude 3, whose induced minor is a tree on the terminals with distortion
at most 8.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Literal, Optional

import numpy as np

from relaxed_voronoi.clustering import InducedMinor, TerminalPartition, validate_partition
from relaxed_voronoi.config import INF, TREE_LEVEL_WIDTH, TREE_SPR_MAGNITUDE, should_validate
from relaxed_voronoi.errors import InputError
from relaxed_voronoi.graph import TerminalSet, WeightedGraph
from relaxed_voronoi.logger import get_logger

logger = get_logger(__name__)

Sweep = Literal["auto", "levels", "vertices"]


@dataclass
class TouchCounter:
    """
    Work counter for the linear-time claim.

    One unit per tree edge a sweep or the root-distance pass crosses, and one
    per vertex offered to a cluster during clustering.
    """

    count: int = 0

    def touch(self, times: int = 1) -> None:
        self.count += times


@dataclass(frozen=True, eq=False)
class RootedTree:
    """
    A tree hung from ``root``.

    ``order`` lists vertices in BFS order (non-decreasing depth), so a reversed
    walk visits children before parents. ``parent[root]`` is -1. The numpy
    mirrors ``parents``, ``weights`` and ``bfs`` back the level-by-level passes;
    ``level_starts[d]`` is the offset in ``bfs`` of the first vertex at depth d.
    """

    graph: WeightedGraph
    root: int
    parent: list[int] = field(repr=False)
    parent_weight: list[float] = field(repr=False)
    children: list[list[int]] = field(repr=False)
    order: list[int] = field(repr=False)
    parents: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    bfs: np.ndarray = field(repr=False)
    level_starts: np.ndarray = field(repr=False)

    @classmethod
    def from_graph(cls, g: WeightedGraph, root: int = 0) -> RootedTree:
        """
        Root a tree.

        Raises:
            InputError: If g is not a tree or root is not a vertex.
        """
        if not 0 <= root < g.n:
            raise InputError(f"root {root} outside [0, {g.n})")
        if not g.is_tree:
            raise InputError(
                f"input is not a tree (n={g.n}, m={g.m}, connected={g.is_connected})"
            )

        parent = [-1] * g.n
        parent_weight = [0.0] * g.n
        depth = [0] * g.n
        children: list[list[int]] = [[] for _ in range(g.n)]
        order = [root]
        visited = bytearray(g.n)
        visited[root] = 1

        head = 0
        while head < len(order):
            u = order[head]
            head += 1
            for v, w in g.adjacency[u]:
                if not visited[v]:
                    visited[v] = 1
                    parent[v] = u
                    parent_weight[v] = w
                    depth[v] = depth[u] + 1
                    children[u].append(v)
                    order.append(v)

        bfs = np.asarray(order, dtype=np.int64)
        depths = np.asarray(depth, dtype=np.int64)[bfs]
        level_starts = np.concatenate(([0], np.flatnonzero(np.diff(depths)) + 1, [g.n]))
        return cls(
            g,
            root,
            parent,
            parent_weight,
            children,
            order,
            np.asarray(parent, dtype=np.int64),
            np.asarray(parent_weight, dtype=np.float64),
            bfs,
            level_starts,
        )

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def height(self) -> int:
        return len(self.level_starts) - 2

    @cached_property
    def has_zero_weight(self) -> bool:
        return bool(np.any(self.weights[self.bfs[1:]] == 0.0))

    def levels(self, reverse: bool = False) -> Iterator[np.ndarray]:
        """Vertices of each depth below the root, top-down (bottom-up with ``reverse``)."""
        depths = range(self.height, 0, -1) if reverse else range(1, self.height + 1)
        for d in depths:
            yield self.bfs[self.level_starts[d]:self.level_starts[d + 1]]

    def leaves(self) -> list[int]:
        """Childless vertices in id order (the root alone when n = 1)."""
        return [v for v in range(self.n) if not self.children[v] and (v != self.root or self.n == 1)]


@dataclass(frozen=True)
class SprResult:
    """Output of tree Steiner point removal."""

    partition: TerminalPartition
    minor: InducedMinor
    order: TerminalSet
    magnitude: float
    edge_touches: int
    root_in_first_cluster: bool


def _by_levels(tree: RootedTree, sweep: Sweep) -> bool:
    if sweep == "auto":
        return (tree.height + 1) * TREE_LEVEL_WIDTH <= tree.n
    return sweep == "levels"


# =============================================================================
# SWEEPS
# =============================================================================

def _upward_levels(
    tree: RootedTree,
    terminals: TerminalSet,
    counter: TouchCounter,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One bottom-up pass giving, per vertex v:

    - d(v), the distance to the nearest terminal in v's subtree (INF if none);
    - the smallest position in ``terminals`` among v's subtree terminals (k if none);
    - the distance from v down to that first terminal.
    """
    n, k = tree.n, terminals.k
    ids = np.asarray(terminals.terminals, dtype=np.int64)
    below = np.full(n, INF)
    below[ids] = 0.0
    first = np.full(n, k, dtype=np.int64)
    first[ids] = np.arange(k)
    to_first = np.full(n, INF)
    to_first[ids] = 0.0

    for level in tree.levels(reverse=True):
        up = tree.parents[level]
        w = tree.weights[level]
        np.minimum.at(below, up, below[level] + w)
        np.minimum.at(first, up, first[level])
        # positions are distinct, so at most one child carries its parent's first terminal
        carried = (first[level] == first[up]) & (first[level] < k)
        to_first[up[carried]] = to_first[level[carried]] + w[carried]
        counter.touch(len(level))
    return below, first, to_first


def _downward_levels(tree: RootedTree, below: np.ndarray, counter: TouchCounter) -> np.ndarray:
    nearest = below.copy()
    for level in tree.levels():
        nearest[level] = np.minimum(nearest[level], nearest[tree.parents[level]] + tree.weights[level])
        counter.touch(len(level))
    return nearest


def _terminal_distances_by_vertex(tree: RootedTree, terminals: TerminalSet, counter: TouchCounter) -> np.ndarray:
    parent, weight, order = tree.parent, tree.parent_weight, tree.order

    below = [INF] * tree.n
    for t in terminals:
        below[t] = 0.0

    crossed = 0
    for v in reversed(order):
        p = parent[v]
        if p < 0:
            continue
        crossed += 1
        if below[v] < INF:
            candidate = below[v] + weight[v]
            if candidate < below[p]:
                below[p] = candidate

    nearest = below
    for v in order:
        p = parent[v]
        if p < 0:
            continue
        crossed += 1
        if nearest[p] < INF:
            candidate = nearest[p] + weight[v]
            if candidate < nearest[v]:
                nearest[v] = candidate

    counter.touch(crossed)
    return np.asarray(nearest, dtype=np.float64)


def tree_terminal_distances(
    tree: RootedTree,
    terminals: TerminalSet,
    counter: Optional[TouchCounter] = None,
    sweep: Sweep = "auto",
) -> np.ndarray:
    """
    D(v) by two sweeps.

    The upward sweep computes d(v), the distance to the nearest terminal in
    v's subtree (INF if none). The downward sweep sets
    D(v) = min(d(v), D(parent) + w(parent, v)). Each edge is crossed once per
    sweep.

    Args:
        tree: Rooted tree.
        terminals: Non-empty terminal set.
        counter: Optional work counter.
        sweep: ``levels`` (numpy per BFS level), ``vertices`` (per-vertex loop)
            or ``auto`` (levels when the tree is shallow).

    Returns:
        Array of length n.
    """
    terminals.check_within(tree.n)
    counter = counter if counter is not None else TouchCounter()
    if not _by_levels(tree, sweep):
        return _terminal_distances_by_vertex(tree, terminals, counter)
    below, _, _ = _upward_levels(tree, terminals, counter)
    return _downward_levels(tree, below, counter)


def tree_root_distances(
    tree: RootedTree,
    counter: Optional[TouchCounter] = None,
    sweep: Sweep = "auto",
) -> np.ndarray:
    """d_T(root, v) for every v; each vertex is final once its parent is."""
    counter = counter if counter is not None else TouchCounter()

    if _by_levels(tree, sweep):
        dist = np.empty(tree.n)
        dist[tree.root] = 0.0
        for level in tree.levels():
            dist[level] = dist[tree.parents[level]] + tree.weights[level]
            counter.touch(len(level))
        return dist

    dist_list = [INF] * tree.n
    dist_list[tree.root] = 0.0
    queue = deque([tree.root])
    children, weight = tree.children, tree.parent_weight
    crossed = 0
    while queue:
        u = queue.popleft()
        for v in children[u]:
            dist_list[v] = dist_list[u] + weight[v]
            queue.append(v)
            crossed += 1
    counter.touch(crossed)
    return np.asarray(dist_list, dtype=np.float64)


# =============================================================================
# CLUSTERING
# =============================================================================

def _claim_by_levels(
    tree: RootedTree,
    order: TerminalSet,
    magnitude: float,
    nearest: np.ndarray,
    first: np.ndarray,
    to_first: np.ndarray,
    counter: TouchCounter,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Top-down clustering; returns (owner, reach).

    reach[v] = d_T(v, terminal of v's cluster). A vertex whose subtree holds
    its parent's cluster terminal sits on the path up to that cluster's top.
    """
    is_terminal = np.zeros(tree.n, dtype=bool)
    is_terminal[list(order)] = True
    owner = np.empty(tree.n, dtype=np.int64)
    reach = np.empty(tree.n)
    owner[tree.root] = first[tree.root]
    reach[tree.root] = to_first[tree.root]

    for level in tree.levels():
        up = tree.parents[level]
        cluster = owner[up]
        extended = reach[up] + tree.weights[level]
        joins = (first[level] != cluster) & ~is_terminal[level] & (extended <= magnitude * nearest[level])
        owner[level] = np.where(joins, cluster, first[level])
        reach[level] = np.where(joins, extended, to_first[level])
        counter.touch(len(level))
    return owner, reach


def _claim_by_frontier(
    tree: RootedTree,
    order: TerminalSet,
    magnitude: float,
    nearest: list[float],
    counter: TouchCounter,
) -> tuple[np.ndarray, np.ndarray]:
    """Create-Cluster per terminal with a FIFO frontier; returns (owner, reach)."""
    adjacency = tree.graph.adjacency
    owner = [-1] * tree.n
    reach = [0.0] * tree.n
    for i, t in enumerate(order):
        owner[t] = i

    offered = 0
    for j, t in enumerate(order):
        queue = deque([t])
        while queue:
            u = queue.popleft()
            for v, w in adjacency[u]:
                if owner[v] >= 0:
                    continue
                # v is never re-offered to this cluster: its only path to t runs through u
                offered += 1
                distance = reach[u] + w
                if distance <= magnitude * nearest[v]:
                    owner[v] = j
                    reach[v] = distance
                    queue.append(v)
    counter.touch(offered)

    if min(owner) < 0:
        raise InputError("some vertex was left unclustered; is the tree connected?")
    return np.asarray(owner, dtype=np.int64), np.asarray(reach, dtype=np.float64)


def _cut_edges(tree: RootedTree, owner: np.ndarray, reach: np.ndarray) -> tuple[tuple[int, int, float], ...]:
    """Minor edges from tree edges crossing clusters; clusters are connected, so each pair appears once."""
    below = tree.bfs[1:]
    above = tree.parents[below]
    cut = owner[below] != owner[above]
    v, p = below[cut], above[cut]
    a, b = owner[v], owner[p]
    w = reach[v] + tree.weights[v] + reach[p]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    rank = np.lexsort((hi, lo))
    return tuple(zip(lo[rank].tolist(), hi[rank].tolist(), w[rank].tolist()))


# =============================================================================
# STEINER POINT REMOVAL
# =============================================================================

def spr_tree(
    tree: RootedTree,
    terminals: TerminalSet,
    magnitude: float = TREE_SPR_MAGNITUDE,
    counter: Optional[TouchCounter] = None,
    validate: Optional[bool] = None,
    sweep: Sweep = "auto",
) -> SprResult:
    """
    Steiner point removal on a tree in linear time.

    Terminals are ordered by distance from the root (lowest id on ties) and
    every terminal gets the same magnitude. Clusters grow from each terminal
    through vertices passing d(v, t_j) <= R * D(v); minor edges come from tree
    edges whose endpoints landed in different clusters.

    Args:
        tree: Rooted tree; the root fixes the ordering.
        terminals: Terminal set (its own order is ignored).
        magnitude: Constant R >= 1.
        counter: Optional work counter; a fresh one is used otherwise.
        validate: Override of the RV_VALIDATE level.
        sweep: Pass strategy, as in ``tree_terminal_distances``.

    Returns:
        SprResult with the partition, its minor and the ordering used.
    """
    if not magnitude >= 1.0:
        raise InputError(f"magnitude must be >= 1, got {magnitude}")
    terminals.check_within(tree.n)
    counter = counter if counter is not None else TouchCounter()

    from_root = tree_root_distances(tree, counter, sweep)
    ids = np.asarray(terminals.terminals, dtype=np.int64)
    order = terminals.reordered(ids[np.lexsort((ids, from_root[ids]))].tolist())

    if _by_levels(tree, sweep) and not tree.has_zero_weight:
        below, first, to_first = _upward_levels(tree, order, counter)
        nearest = _downward_levels(tree, below, counter)
        owner, reach = _claim_by_levels(tree, order, magnitude, nearest, first, to_first, counter)
    else:
        nearest = tree_terminal_distances(tree, order, counter, sweep)
        owner, reach = _claim_by_frontier(tree, order, magnitude, nearest.tolist(), counter)

    partition = TerminalPartition.from_owner(order, owner)
    if should_validate(validate):
        validate_partition(tree.graph, order, partition)
    minor = InducedMinor(order, _cut_edges(tree, owner, reach))

    root_in_first = bool(owner[tree.root] == 0)
    if not root_in_first:
        logger.warning(f"root {tree.root} landed in cluster {owner[tree.root]}, not the first cluster")
    logger.debug(f"tree SPR: n={tree.n}, k={order.k}, R={magnitude}, touches={counter.count}")

    return SprResult(partition, minor, order, magnitude, counter.count, root_in_first)


def spr_tree_from_graph(
    g: WeightedGraph,
    terminals: TerminalSet,
    root: int = 0,
    magnitude: float = TREE_SPR_MAGNITUDE,
) -> SprResult:
    """Root ``g`` at ``root`` and run ``spr_tree``; rejects non-trees."""
    return spr_tree(RootedTree.from_graph(g, root), terminals, magnitude)
