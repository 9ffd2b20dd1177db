"""
Plain-text instance format.

Layout::

    # comment lines are skipped anywhere
    n m k
    t_1 t_2 ... t_k          (terminal ids in pi order)
    u v w                    (m edge lines)
"""

from __future__ import annotations

from pathlib import Path

from relaxed_voronoi.errors import InputError
from relaxed_voronoi.graph import TerminalSet, WeightedGraph


def _content_lines(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def parse_instance(text: str) -> tuple[WeightedGraph, TerminalSet]:
    """
    Parse an instance from its text form.

    Args:
        text: File contents.

    Returns:
        Tuple of (graph, terminals in pi order).

    Raises:
        InputError: On any structural or numeric problem.
    """
    lines = _content_lines(text)
    if len(lines) < 2:
        raise InputError("instance needs a header line and a terminal line")

    try:
        n, m, k = (int(x) for x in lines[0].split())
    except ValueError as e:
        raise InputError(f"bad header line {lines[0]!r}: expected 'n m k'") from e

    try:
        terminals = [int(x) for x in lines[1].split()]
    except ValueError as e:
        raise InputError(f"bad terminal line {lines[1]!r}") from e
    if len(terminals) != k:
        raise InputError(f"header declares k={k} terminals, terminal line has {len(terminals)}")

    edge_lines = lines[2:]
    if len(edge_lines) != m:
        raise InputError(f"header declares m={m} edges, found {len(edge_lines)} edge lines")

    edges = []
    for line in edge_lines:
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"bad edge line {line!r}: expected 'u v w'")
        try:
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError as e:
            raise InputError(f"bad edge line {line!r}") from e

    graph = WeightedGraph(n, edges)
    terminal_set = TerminalSet(terminals)
    terminal_set.check_within(n)
    return graph, terminal_set


def read_instance(path: str | Path) -> tuple[WeightedGraph, TerminalSet]:
    """Read an instance file (see module docstring for the format)."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"instance file not found: {path}")
    return parse_instance(path.read_text(encoding="utf-8"))


def format_instance(graph: WeightedGraph, terminals: TerminalSet, comment: str = "") -> str:
    """Render an instance in the text format."""
    lines = []
    if comment:
        lines.extend(f"# {line}" for line in comment.splitlines())
    lines.append(f"{graph.n} {graph.m} {terminals.k}")
    lines.append(" ".join(str(t) for t in terminals))
    lines.extend(f"{u} {v} {w!r}" for u, v, w in graph.edges)
    return "\n".join(lines) + "\n"


def write_instance(
    path: str | Path,
    graph: WeightedGraph,
    terminals: TerminalSet,
    comment: str = "",
) -> None:
    """Write an instance file, creating parent directories as needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_instance(graph, terminals, comment), encoding="utf-8")
