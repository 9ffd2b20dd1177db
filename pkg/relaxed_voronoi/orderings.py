"""
Terminal orderings.

The ordering pi decides which terminal claims contested points first. Three
policies are supported: the order as given, increasing distance from a root
vertex (tree Steiner point removal), and farthest-first traversal (doubling
metric 0-extension). Ties are always broken toward the lower id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from relaxed_voronoi.errors import InputError
from relaxed_voronoi.graph import (
    MetricSpace,
    TerminalSet,
    WeightedGraph,
    metric_from_graph,
    shortest_paths_from,
)

OrderingKind = Literal["given", "root", "gonzalez"]


@dataclass(frozen=True)
class OrderingPolicy:
    """How to derive pi from an instance; ``anchor`` is the root or start id."""

    kind: OrderingKind = "given"
    anchor: Optional[int] = None

    @classmethod
    def given(cls) -> OrderingPolicy:
        return cls("given")

    @classmethod
    def root_distance(cls, root: int) -> OrderingPolicy:
        return cls("root", root)

    @classmethod
    def gonzalez(cls, start: Optional[int] = None) -> OrderingPolicy:
        return cls("gonzalez", start)

    @classmethod
    def parse(cls, text: str) -> OrderingPolicy:
        """
        Parse the CLI spelling ``given``, ``root:<id>``, ``gonzalez[:<id>]``.

        Raises:
            InputError: On an unknown or malformed policy.
        """
        name, _, arg = text.strip().partition(":")
        try:
            if name == "given" and not arg:
                return cls.given()
            if name == "root" and arg:
                return cls.root_distance(int(arg))
            if name == "gonzalez":
                return cls.gonzalez(int(arg) if arg else None)
        except ValueError as e:
            raise InputError(f"bad ordering {text!r}: vertex id must be an integer") from e
        raise InputError(f"unknown ordering {text!r}; use given, root:<id> or gonzalez[:<id>]")

    def __str__(self) -> str:
        if self.kind == "given":
            return "given"
        if self.anchor is None:
            return self.kind
        return f"{self.kind}:{self.anchor}"


def root_distance_order(g: WeightedGraph, terminals: TerminalSet, root: int) -> TerminalSet:
    """
    Sort terminals by d_G(root, t), lower id first on ties.

    Args:
        g: Connected graph.
        terminals: Terminal set.
        root: Any vertex.

    Returns:
        The reordered terminal set.
    """
    g.require_connected()
    terminals.check_within(g.n)
    from_root = shortest_paths_from(g, root)
    return terminals.reordered(sorted(terminals, key=lambda t: (from_root[t], t)))


def gonzalez_order(
    metric: MetricSpace,
    terminals: TerminalSet,
    start: Optional[int] = None,
) -> TerminalSet:
    """
    Farthest-first traversal of the terminals.

    t_1 is ``start`` (lowest terminal id by default) and each t_i maximizes
    d(t_i, {t_1..t_{i-1}}) among the remaining terminals, lower id on ties.

    Raises:
        InputError: If ``start`` is not a terminal.
    """
    terminals.check_within(metric.n)
    ids = np.array(sorted(terminals), dtype=np.int64)
    if start is None:
        start = int(ids[0])
    if start not in terminals:
        raise InputError(f"Gonzalez start {start} is not a terminal")

    order = [start]
    taken = np.zeros(len(ids), dtype=bool)
    taken[np.searchsorted(ids, start)] = True
    # Distance of every terminal to the chosen prefix
    gap = metric.dist[start, ids].copy()

    for _ in range(len(ids) - 1):
        candidates = np.where(taken, -np.inf, gap)
        # argmax returns the first maximum, i.e. the lowest id, since ids are sorted
        best = int(np.argmax(candidates))
        taken[best] = True
        order.append(int(ids[best]))
        gap = np.minimum(gap, metric.dist[ids[best], ids])

    return terminals.reordered(order)


def insertion_radii(metric: MetricSpace, order: TerminalSet) -> list[float]:
    """r_i = d(t_i, {t_1..t_{i-1}}) for i >= 2 (r_1 is omitted)."""
    ids = np.asarray(order.terminals, dtype=np.int64)
    return [float(metric.dist[ids[i], ids[:i]].min()) for i in range(1, len(ids))]


def order_terminals(
    policy: OrderingPolicy,
    terminals: TerminalSet,
    graph: Optional[WeightedGraph] = None,
    metric: Optional[MetricSpace] = None,
) -> TerminalSet:
    """
    Apply an ordering policy to an instance.

    Root-distance ordering needs the graph; Gonzalez ordering uses the metric
    (derived from the graph when only a graph is supplied).
    """
    if policy.kind == "given":
        return terminals
    if policy.kind == "root":
        if graph is None:
            raise InputError("root-distance ordering needs a graph instance")
        assert policy.anchor is not None
        if not 0 <= policy.anchor < graph.n:
            raise InputError(f"root {policy.anchor} outside [0, {graph.n})")
        return root_distance_order(graph, terminals, policy.anchor)
    if metric is None:
        if graph is None:
            raise InputError("Gonzalez ordering needs a metric or a graph")
        metric = metric_from_graph(graph)
    return gonzalez_order(metric, terminals, policy.anchor)
