"""
Evaluation: exact minor distortion, Monte-Carlo expected stretch, settle/cut
statistics, and the Floyd-Warshall oracle.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Mapping, Optional

import numpy as np

from relaxed_voronoi.clustering import (
    Frontier,
    InducedMinor,
    graphic_relaxed_voronoi,
    metric_relaxed_voronoi,
    terminal_distance_rows,
)
from relaxed_voronoi.config import (
    DEFAULT_PAIR_SAMPLE,
    DEFAULT_PAIR_SEED,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
    DISTANCE_TOLERANCE,
    EXHAUSTIVE_PAIR_LIMIT,
    FLOYD_WARSHALL_CAP,
    INF,
)
from relaxed_voronoi.errors import InputError, InvariantViolation
from relaxed_voronoi.graph import (
    MetricSpace,
    TerminalInstance,
    TerminalSet,
    WeightedGraph,
    metric_from_graph,
    shortest_paths_from,
    terminal_distances,
)
from relaxed_voronoi.logger import get_logger
from relaxed_voronoi.magnitudes import MagnitudePolicy, derive_seed, make_magnitudes, make_rng
from relaxed_voronoi.orderings import OrderingPolicy, order_terminals

logger = get_logger(__name__)

EngineKind = Literal["metric", "graphic"]


# =============================================================================
# ORACLES
# =============================================================================

def floyd_warshall(g: WeightedGraph, cap: int = FLOYD_WARSHALL_CAP) -> np.ndarray:
    """
    All-pairs shortest paths by dynamic programming.

    Args:
        g: Graph with non-negative weights.
        cap: Largest n accepted.

    Returns:
        n x n array; disconnected pairs hold ``INF``.

    Raises:
        InputError: If n exceeds ``cap``.
    """
    if g.n > cap:
        raise InputError(
            f"Floyd-Warshall oracle is capped at n={cap} (got n={g.n}); "
            "use per-source Dijkstra (shortest_paths_from) instead"
        )
    dist = np.full((g.n, g.n), INF, dtype=np.float64)
    np.fill_diagonal(dist, 0.0)
    for u, v, w in g.edges:
        if w < dist[u, v]:
            dist[u, v] = dist[v, u] = w
    for k in range(g.n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    return dist


# =============================================================================
# WORST-CASE DISTORTION
# =============================================================================

@dataclass(frozen=True, eq=False)
class DistortionReport:
    """
    Worst-case distortion of an induced minor.

    ``argmax_pair`` holds terminal ids and is None when k = 1. ``per_pair`` is
    the k x k ratio table in minor order (diagonal 1) when requested.
    """

    max_distortion: float
    argmax_pair: Optional[tuple[int, int]]
    per_pair: Optional[np.ndarray] = field(default=None, repr=False)


def minor_distortion(
    g: WeightedGraph,
    terminals: TerminalSet,
    minor: InducedMinor,
    rows: Optional[Mapping[int, np.ndarray]] = None,
    per_pair: bool = False,
) -> DistortionReport:
    """
    Exact max over terminal pairs of d_M / d_G.

    Raises:
        InvariantViolation: If some pair has d_M < d_G beyond tolerance.
    """
    if set(minor.terminals) != set(terminals):
        raise InputError("minor and terminal set disagree")
    k = minor.k
    if k == 1:
        table = np.ones((1, 1)) if per_pair else None
        return DistortionReport(1.0, None, table)

    order = minor.terminals
    if rows is None:
        rows = terminal_distance_rows(g, order)
    ids = np.asarray(order.terminals, dtype=np.int64)
    original = np.vstack([rows[t][ids] for t in order])
    contracted = minor.distance_matrix()

    below = contracted < original - DISTANCE_TOLERANCE
    if np.any(below):
        i, j = np.argwhere(below)[0]
        detail = f"d_M({ids[i]},{ids[j]})={contracted[i, j]} < d_G={original[i, j]}"
        logger.error(f"minor domination failed: {detail}")
        raise InvariantViolation("minor-domination", detail)

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(
            original > DISTANCE_TOLERANCE,
            contracted / original,
            np.where(contracted > DISTANCE_TOLERANCE, INF, 1.0),
        )
    ratios = np.maximum(ratios, 1.0)
    np.fill_diagonal(ratios, 1.0)

    upper = np.triu_indices(k, 1)
    flat = ratios[upper]
    best = int(np.argmax(flat))
    i, j = int(upper[0][best]), int(upper[1][best])
    return DistortionReport(
        float(flat[best]),
        (int(ids[i]), int(ids[j])),
        ratios if per_pair else None,
    )


# =============================================================================
# EXPECTED STRETCH
# =============================================================================

@dataclass(frozen=True)
class EngineConfig:
    """Engine plus the ordering and magnitude policies it runs with."""

    engine: EngineKind = "metric"
    ordering: OrderingPolicy = field(default_factory=OrderingPolicy.given)
    magnitudes: MagnitudePolicy = field(default_factory=MagnitudePolicy)
    frontier: Frontier = "fifo"


@dataclass(frozen=True)
class PairStretch:
    x: int
    y: int
    distance: float
    mean: float
    variance: float


@dataclass(frozen=True)
class StretchReport:
    """Per-pair mean of d(f(x), f(y)) / d(x, y) over trials, maximized."""

    pairs: tuple[PairStretch, ...]
    max_mean_stretch: float
    argmax_pair: Optional[tuple[int, int]]
    trials: int
    seed: int
    skipped_zero_pairs: int = 0
    pair_seed: Optional[int] = None


def _pair_from_index(n: int, index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Row x owns linear indices [offset[x], offset[x] + n - 1 - x)
    offsets = np.concatenate(([0], np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64))))
    x = np.searchsorted(offsets, index, side="right") - 1
    y = x + 1 + (index - offsets[x])
    return x, y


def sample_pairs(n: int, size: int, seed: int) -> list[tuple[int, int]]:
    """
    Point pairs x < y to evaluate: all of them when n is at most
    ``EXHAUSTIVE_PAIR_LIMIT``, otherwise ``size`` drawn uniformly without
    replacement.
    """
    total = n * (n - 1) // 2
    if n <= EXHAUSTIVE_PAIR_LIMIT or size >= total:
        index = np.arange(total, dtype=np.int64)
    else:
        rng = make_rng(derive_seed(seed, "pairs"))
        index = np.sort(rng.choice(total, size=size, replace=False)).astype(np.int64)
    xs, ys = _pair_from_index(n, index)
    return list(zip(xs.tolist(), ys.tolist()))


def _edge_pairs(g: WeightedGraph) -> list[tuple[int, int]]:
    return sorted({(u, v) if u < v else (v, u) for u, v, _ in g.edges})


def _pair_distances(
    pairs: list[tuple[int, int]],
    graph: Optional[WeightedGraph],
    metric: Optional[MetricSpace],
) -> np.ndarray:
    xs = np.fromiter((x for x, _ in pairs), dtype=np.int64, count=len(pairs))
    ys = np.fromiter((y for _, y in pairs), dtype=np.int64, count=len(pairs))
    if metric is not None:
        return metric.dist[xs, ys]
    assert graph is not None
    if graph.n <= FLOYD_WARSHALL_CAP:
        return floyd_warshall(graph)[xs, ys]
    by_source: dict[int, np.ndarray] = {}
    for x in np.unique(xs).tolist():
        by_source[x] = shortest_paths_from(graph, x)
    return np.asarray([by_source[x][y] for x, y in pairs], dtype=np.float64)


def expected_stretch(
    instance: TerminalInstance,
    config: EngineConfig,
    pair_sample: int = DEFAULT_PAIR_SAMPLE,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    workers: int = DEFAULT_WORKERS,
    pair_seed: int = DEFAULT_PAIR_SEED,
) -> StretchReport:
    """
    Estimate the expected stretch of a randomized engine.

    The metric engine is scored on point pairs (exhaustive for small n, else
    sampled); the graphic engine on the edges of the graph, which bounds all
    pairs by the triangle inequality. Trial t draws its magnitudes from
    ``derive_seed(seed, "trial", t)``; results are merged in trial order, so
    the report does not depend on ``workers``. Sampled pairs come from
    ``pair_seed`` alone, so changing ``seed`` changes only the trials.

    Args:
        instance: Graph or metric with terminals.
        config: Engine and policies.
        pair_sample: Pair sample size when n is large.
        trials: Number of engine runs (>= 1).
        seed: Base seed for the trials.
        workers: Thread fan-out for trials.
        pair_seed: Seed of the pair sample; unused when every pair is scored.

    Returns:
        StretchReport; pairs at distance zero are skipped and counted.
    """
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise InputError(f"workers must be >= 1, got {workers}")

    graph, metric = instance.graph, instance.metric
    if config.engine == "graphic":
        if graph is None:
            raise InputError("the graphic engine needs a graph instance")
        graph.require_connected()
        order = order_terminals(config.ordering, instance.terminals, graph=graph)
        rows = terminal_distance_rows(graph, order)
        nearest = terminal_distances(graph, order)
        candidate_pairs = _edge_pairs(graph)
        distances = _pair_distances(candidate_pairs, graph, None)
    else:
        if metric is None:
            assert graph is not None
            metric = metric_from_graph(graph)
        order = order_terminals(config.ordering, instance.terminals, graph=graph, metric=metric)
        candidate_pairs = sample_pairs(metric.n, pair_sample, pair_seed)
        distances = _pair_distances(candidate_pairs, None, metric)

    keep = distances > DISTANCE_TOLERANCE
    skipped = int(np.count_nonzero(~keep))
    pairs = [p for p, ok in zip(candidate_pairs, keep.tolist()) if ok]
    distances = distances[keep]
    xs = np.asarray([x for x, _ in pairs], dtype=np.int64)
    ys = np.asarray([y for _, y in pairs], dtype=np.int64)

    def run_trial(t: int) -> np.ndarray:
        magnitudes = make_magnitudes(config.magnitudes, order.k, seed=derive_seed(seed, "trial", t))
        if config.engine == "graphic":
            assert graph is not None
            partition = graphic_relaxed_voronoi(
                graph, order, magnitudes,
                rows=rows, nearest=nearest, frontier=config.frontier, validate=True,
            )
            f = partition.to_retraction().assignment
            fx, fy = f[xs], f[ys]
            image = np.asarray([rows[a][b] for a, b in zip(fx.tolist(), fy.tolist())], dtype=np.float64)
        else:
            assert metric is not None
            f = metric_relaxed_voronoi(metric, order, magnitudes).assignment
            image = metric.dist[f[xs], f[ys]]
        return image / distances

    started = time.perf_counter()
    if workers == 1 or trials == 1:
        results = [run_trial(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_trial, range(trials)))

    if pairs:
        stacked = np.vstack(results)
        means = stacked.mean(axis=0)
        variances = stacked.var(axis=0)
        best = int(np.argmax(means))
        max_mean, argmax = float(means[best]), pairs[best]
    else:
        means = variances = np.zeros(0)
        max_mean, argmax = 0.0, None

    report = StretchReport(
        pairs=tuple(
            PairStretch(x, y, float(d), float(mu), float(var))
            for (x, y), d, mu, var in zip(pairs, distances.tolist(), means.tolist(), variances.tolist())
        ),
        max_mean_stretch=max_mean,
        argmax_pair=argmax,
        trials=trials,
        seed=seed,
        skipped_zero_pairs=skipped,
        pair_seed=pair_seed if config.engine == "metric" else None,
    )
    logger.info(
        f"{config.engine} stretch: {len(pairs)} pairs x {trials} trials, "
        f"max mean {max_mean:.4f} ({time.perf_counter() - started:.2f}s)"
    )
    return report


# =============================================================================
# SETTLE / CUT STATISTICS
# =============================================================================

@dataclass(frozen=True)
class CutReport:
    """
    How often each terminal settled and cut a fixed pair (x, y).

    A terminal settles the pair when it is the first in pi to claim x or y,
    and cuts it when it claims exactly one of them.
    """

    x: int
    y: int
    trials: int
    seed: int
    settles: dict[int, int]
    cuts: dict[int, int]

    @property
    def cut_probability(self) -> float:
        return sum(self.cuts.values()) / self.trials


def cut_statistics(
    metric: MetricSpace,
    terminals: TerminalSet,
    ordering: OrderingPolicy,
    magnitudes: MagnitudePolicy,
    x: int,
    y: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> CutReport:
    """Run the metric engine ``trials`` times and tally who settles/cuts (x, y)."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    for point in (x, y):
        if not 0 <= point < metric.n:
            raise InputError(f"point {point} outside [0, {metric.n})")

    order = order_terminals(ordering, terminals, metric=metric)
    position = order.position
    settles = {t: 0 for t in order}
    cuts = {t: 0 for t in order}
    for t in range(trials):
        vector = make_magnitudes(magnitudes, order.k, seed=derive_seed(seed, "trial", t))
        f = metric_relaxed_voronoi(metric, order, vector)
        fx, fy = f[x], f[y]
        settler = fx if position[fx] <= position[fy] else fy
        settles[settler] += 1
        if fx != fy:
            cuts[settler] += 1

    return CutReport(x, y, trials, seed, settles, cuts)
