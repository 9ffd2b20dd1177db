"""Hypothesis strategies for graphs, trees and terminal instances."""

from hypothesis import strategies as st

from relaxed_voronoi.graph import TerminalSet, WeightedGraph

weights = st.floats(min_value=0.5, max_value=10.0, allow_nan=False, allow_infinity=False)


@st.composite
def trees(draw, min_n: int = 1, max_n: int = 30) -> WeightedGraph:
    """Random-parent trees with positive weights."""
    n = draw(st.integers(min_n, max_n))
    edges = [(draw(st.integers(0, i - 1)), i, draw(weights)) for i in range(1, n)]
    return WeightedGraph(n, edges)


@st.composite
def connected_graphs(draw, min_n: int = 1, max_n: int = 25, max_extra: int = 30) -> WeightedGraph:
    """A random spanning tree plus extra non-loop edges."""
    tree = draw(trees(min_n, max_n))
    n = tree.n
    if n == 1:
        return tree
    extra = draw(
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), weights), max_size=max_extra)
    )
    return WeightedGraph(n, list(tree.edges) + [(u, v, w) for u, v, w in extra if u != v])


@st.composite
def terminal_sets(draw, n: int, min_k: int = 1) -> TerminalSet:
    """Distinct terminal ids in a random order (the order is pi)."""
    ids = draw(st.lists(st.integers(0, n - 1), min_size=min(min_k, n), max_size=n, unique=True))
    return TerminalSet(ids)


@st.composite
def graph_instances(draw, tree_only: bool = False, max_n: int = 25) -> tuple[WeightedGraph, TerminalSet]:
    g = draw(trees(1, max_n) if tree_only else connected_graphs(1, max_n))
    return g, draw(terminal_sets(g.n))


@st.composite
def magnitude_lists(draw, k: int) -> list[float]:
    return draw(
        st.lists(st.floats(min_value=1.0, max_value=8.0, allow_nan=False), min_size=k, max_size=k)
    )
