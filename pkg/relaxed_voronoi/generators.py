"""
Instance generators and a doubling-dimension helper.

Families: complete binary trees (leaves numbered left to right), random
weighted trees, random connected graphs and grid metrics. Every random
generator is a pure function of its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from relaxed_voronoi.config import DEFAULT_GRID_NORM, DEFAULT_SEED, DEFAULT_WEIGHT_RANGE
from relaxed_voronoi.errors import InputError
from relaxed_voronoi.graph import MetricSpace, TerminalInstance, TerminalSet, WeightedGraph
from relaxed_voronoi.magnitudes import derive_seed, make_rng
from relaxed_voronoi.tree_fast import RootedTree

FamilyKind = Literal["btree", "tree", "graph", "grid"]
TerminalRuleKind = Literal["leaves", "random", "explicit"]


# =============================================================================
# FAMILIES
# =============================================================================

def complete_binary_tree(height: int) -> RootedTree:
    """
    Complete binary tree with unit weights, rooted at vertex 0.

    Heap numbering: the children of v are 2v+1 and 2v+2, so the leaves are
    the contiguous ids 2^height - 1 .. 2^(height+1) - 2 from left to right.
    """
    if height < 1:
        raise InputError(f"height must be >= 1, got {height}")
    n = 2 ** (height + 1) - 1
    edges = [((v - 1) // 2, v, 1.0) for v in range(1, n)]
    return RootedTree.from_graph(WeightedGraph(n, edges), root=0)


def _check_weight_range(weight_range: tuple[float, float]) -> None:
    low, high = weight_range
    if not 0 <= low <= high:
        raise InputError(f"weight range must satisfy 0 <= low <= high, got {weight_range}")


def random_tree(
    n: int,
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE,
    seed: int = DEFAULT_SEED,
) -> WeightedGraph:
    """
    Random weighted tree by random-parent attachment.

    Vertex i >= 1 attaches to a uniform parent in [0, i); weights are uniform
    in ``weight_range``.
    """
    if n < 1:
        raise InputError(f"tree needs at least one vertex, got n={n}")
    _check_weight_range(weight_range)
    rng = make_rng(seed)
    if n == 1:
        return WeightedGraph(1, [])
    children = np.arange(1, n)
    parents = rng.integers(0, children)
    weights = rng.uniform(weight_range[0], weight_range[1], size=n - 1)
    return WeightedGraph(n, zip(parents.tolist(), children.tolist(), weights.tolist()))


def random_connected_graph(
    n: int,
    m: int,
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE,
    seed: int = DEFAULT_SEED,
) -> WeightedGraph:
    """
    Random connected simple graph with exactly m edges.

    A random-parent spanning tree guarantees connectivity; the remaining
    m - n + 1 edges are distinct non-tree pairs drawn uniformly.
    """
    max_edges = n * (n - 1) // 2
    if n < 1 or not n - 1 <= m <= max_edges:
        raise InputError(f"need n >= 1 and n-1 <= m <= {max_edges}, got n={n}, m={m}")
    _check_weight_range(weight_range)

    tree = random_tree(n, weight_range, seed)
    present = {(min(u, v), max(u, v)) for u, v, _ in tree.edges}
    extra = m - (n - 1)
    rng = make_rng(derive_seed(seed, "extra-edges"))

    chosen: list[tuple[int, int]] = []
    if extra > (max_edges - len(present)) // 2:
        # Dense: enumerate the complement and pick without replacement
        complement = [
            (u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in present
        ]
        picks = rng.choice(len(complement), size=extra, replace=False)
        chosen = [complement[i] for i in np.sort(picks).tolist()]
    else:
        while len(chosen) < extra:
            for u, v in rng.integers(0, n, size=(2 * (extra - len(chosen)) + 8, 2)).tolist():
                if u == v:
                    continue
                key = (u, v) if u < v else (v, u)
                if key not in present:
                    present.add(key)
                    chosen.append(key)
                    if len(chosen) == extra:
                        break

    weights = rng.uniform(weight_range[0], weight_range[1], size=extra).tolist()
    edges = list(tree.edges) + [(u, v, w) for (u, v), w in zip(chosen, weights)]
    return WeightedGraph(n, edges)


def _grid_coordinates(side: int) -> np.ndarray:
    ids = np.arange(side * side)
    return np.stack([ids // side, ids % side], axis=1).astype(np.float64)


def grid_metric(side: int, p: float = DEFAULT_GRID_NORM) -> MetricSpace:
    """
    side x side integer grid under the p-norm (p = inf allowed).

    Point id = row * side + column.
    """
    if side < 2:
        raise InputError(f"grid side must be >= 2, got {side}")
    if not p >= 1:
        raise InputError(f"p-norm needs p >= 1, got {p}")
    coords = _grid_coordinates(side)
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    if math.isinf(p):
        dist = diff.max(axis=2)
    elif p == 1:
        dist = diff.sum(axis=2)
    else:
        dist = (diff ** p).sum(axis=2) ** (1.0 / p)
    return MetricSpace(dist)


def grid_graph(side: int) -> WeightedGraph:
    """Unit-weight grid graph; its shortest-path metric is the L1 grid metric."""
    if side < 2:
        raise InputError(f"grid side must be >= 2, got {side}")
    edges = []
    for r in range(side):
        for c in range(side):
            v = r * side + c
            if c + 1 < side:
                edges.append((v, v + 1, 1.0))
            if r + 1 < side:
                edges.append((v, v + side, 1.0))
    return WeightedGraph(side * side, edges)


# =============================================================================
# DOUBLING DIMENSION
# =============================================================================

def _greedy_net(dist: np.ndarray, radius: float) -> list[int]:
    """Points in id order, each kept iff farther than ``radius`` from all kept ones."""
    gap = np.full(dist.shape[0], np.inf)
    net: list[int] = []
    while True:
        far = np.flatnonzero(gap > radius)
        if far.size == 0:
            return net
        p = int(far[0])
        net.append(p)
        gap = np.minimum(gap, dist[p])


def estimate_ddim(metric: MetricSpace) -> float:
    """
    Greedy-net estimate of the doubling dimension.

    For r halving from the diameter down to the smallest positive distance,
    build a greedy r/2-net and count its points inside every ball of radius
    r; return max log2 of that count. This is an upper-bound style heuristic
    meant to suggest ``--ddim``, not an exact value.

    Raises:
        InputError: If n < 2 or every distance is zero.
    """
    if metric.n < 2:
        raise InputError("doubling dimension needs at least two points")
    dist = metric.dist
    positive = dist[dist > 0]
    if positive.size == 0:
        raise InputError("degenerate metric: all distances are zero")

    smallest = float(positive.min())
    r = float(positive.max())
    best = 1
    while r >= smallest:
        net = _greedy_net(dist, r / 2)
        counts = (dist[:, net] <= r).sum(axis=1)
        best = max(best, int(counts.max()))
        r /= 2
    return math.log2(best)


# =============================================================================
# SPECS
# =============================================================================

@dataclass(frozen=True)
class TerminalRule:
    """AllLeaves, RandomSubset(k) or Explicit(ids)."""

    kind: TerminalRuleKind = "leaves"
    k: int = 0
    ids: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> TerminalRule:
        """Parse ``leaves``, ``random:<k>`` or ``ids:<a>,<b>,...``."""
        name, _, arg = text.strip().partition(":")
        try:
            if name == "leaves" and not arg:
                return cls("leaves")
            if name == "random" and arg:
                return cls("random", k=int(arg))
            if name == "ids" and arg:
                return cls("explicit", ids=tuple(int(x) for x in arg.split(",")))
        except ValueError as e:
            raise InputError(f"bad terminal rule {text!r}") from e
        raise InputError(f"unknown terminal rule {text!r}; use leaves, random:<k> or ids:<a>,<b>,...")

    def __str__(self) -> str:
        if self.kind == "leaves":
            return "leaves"
        if self.kind == "random":
            return f"random:{self.k}"
        return "ids:" + ",".join(str(t) for t in self.ids)


def select_terminals(
    rule: TerminalRule,
    n: int,
    seed: int = DEFAULT_SEED,
    leaves: Optional[Sequence[int]] = None,
) -> TerminalSet:
    """
    Apply a terminal rule; random subsets are returned in increasing id order.

    Raises:
        InputError: If k > n, or AllLeaves is asked of an instance without leaves.
    """
    if rule.kind == "leaves":
        if not leaves:
            raise InputError("this family has no leaves; use random:<k> or ids:<...>")
        return TerminalSet(leaves)
    if rule.kind == "random":
        if not 1 <= rule.k <= n:
            raise InputError(f"need 1 <= k <= n, got k={rule.k}, n={n}")
        rng = make_rng(derive_seed(seed, "terminals"))
        return TerminalSet(np.sort(rng.choice(n, size=rule.k, replace=False)).tolist())
    terminals = TerminalSet(rule.ids)
    terminals.check_within(n)
    return terminals


@dataclass(frozen=True)
class GeneratorSpec:
    """
    A generator family, its parameters, a terminal rule and a seed.

    ``params`` holds (height,) for btree, (n,) for tree, (n, m) for graph and
    (side, p) for grid.
    """

    family: FamilyKind
    params: tuple[float, ...]
    terminals: TerminalRule = field(default_factory=TerminalRule)
    weight_range: tuple[float, float] = DEFAULT_WEIGHT_RANGE
    seed: int = DEFAULT_SEED

    @classmethod
    def parse(cls, family: str, terminals: str = "leaves", seed: int = DEFAULT_SEED) -> GeneratorSpec:
        """Parse ``btree:<h>``, ``tree:<n>``, ``graph:<n>,<m>`` or ``grid:<side>[,<p>]``."""
        name, _, arg = family.strip().partition(":")
        try:
            values = [float(x) for x in arg.split(",")] if arg else []
        except ValueError as e:
            raise InputError(f"bad generator family {family!r}") from e
        arity = {"btree": (1,), "tree": (1,), "graph": (2,), "grid": (1, 2)}
        if name not in arity or len(values) not in arity[name]:
            raise InputError(
                f"unknown generator family {family!r}; use btree:<h>, tree:<n>, graph:<n>,<m> or grid:<side>[,<p>]"
            )
        if name == "grid" and len(values) == 1:
            values.append(DEFAULT_GRID_NORM)
        return cls(name, tuple(values), TerminalRule.parse(terminals), seed=seed)  # type: ignore[arg-type]

    def __str__(self) -> str:
        params = ",".join(f"{v:g}" for v in self.params)
        return f"{self.family}:{params}"


@dataclass(frozen=True)
class Family:
    """A generated structure before terminals are chosen; exactly one of graph or metric is set."""

    graph: Optional[WeightedGraph] = None
    metric: Optional[MetricSpace] = None
    leaves: Optional[list[int]] = None

    @property
    def n(self) -> int:
        if self.graph is not None:
            return self.graph.n
        assert self.metric is not None
        return self.metric.n


def generate_family(spec: GeneratorSpec) -> Family:
    """
    Build the graph or metric of a spec, ignoring its terminal rule.

    Grids under p = 1 come back as the unit grid graph (same metric);
    other norms come back as a metric.
    """
    structure_seed = derive_seed(spec.seed, "family")
    leaves: Optional[list[int]] = None
    graph: Optional[WeightedGraph] = None
    metric: Optional[MetricSpace] = None

    if spec.family == "btree":
        tree = complete_binary_tree(int(spec.params[0]))
        graph, leaves = tree.graph, tree.leaves()
    elif spec.family == "tree":
        graph = random_tree(int(spec.params[0]), spec.weight_range, structure_seed)
        leaves = RootedTree.from_graph(graph, 0).leaves()
    elif spec.family == "graph":
        graph = random_connected_graph(int(spec.params[0]), int(spec.params[1]), spec.weight_range, structure_seed)
        leaves = [v for v in range(graph.n) if len(graph.adjacency[v]) <= 1]
    else:
        side, p = int(spec.params[0]), spec.params[1]
        if p == 1:
            graph = grid_graph(side)
        else:
            metric = grid_metric(side, p)

    return Family(graph, metric, leaves)


def generate(spec: GeneratorSpec) -> TerminalInstance:
    """Build the instance a spec describes, terminals included."""
    family = generate_family(spec)
    terminals = select_terminals(spec.terminals, family.n, spec.seed, family.leaves)
    return TerminalInstance(terminals, graph=family.graph, metric=family.metric)
