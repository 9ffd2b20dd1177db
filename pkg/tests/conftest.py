"""Shared fixtures and hypothesis settings."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from relaxed_voronoi.generators import complete_binary_tree
from relaxed_voronoi.graph import MetricSpace, TerminalSet, WeightedGraph
from relaxed_voronoi.tree_fast import RootedTree

settings.register_profile(
    "rv",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("rv")


def euclidean_metric(points: np.ndarray) -> MetricSpace:
    """Metric of points in the plane (exactly symmetric)."""
    diff = points[:, None, :] - points[None, :, :]
    return MetricSpace(np.sqrt((diff ** 2).sum(axis=2)))


def random_points(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random((n, 2))


@pytest.fixture
def path_graph() -> WeightedGraph:
    """0 - 1 - 2 - 3 with unit weights."""
    return WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])


@pytest.fixture
def star_graph() -> WeightedGraph:
    """Center 0 with unit spokes to 1, 2, 3."""
    return WeightedGraph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])


@pytest.fixture
def binary_tree_6() -> RootedTree:
    return complete_binary_tree(6)


@pytest.fixture
def binary_tree_6_leaves(binary_tree_6: RootedTree) -> TerminalSet:
    return TerminalSet(binary_tree_6.leaves())
