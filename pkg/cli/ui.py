"""
Terminal UI components for the rv CLI.

Everything here prints to stderr so stdout stays a clean JSON report.
"""

from typing import Dict, List, Optional

from rich.console import Console
from rich.live import Live
from rich.spinner import Spinner
from rich.table import Table

from relaxed_voronoi.schemas import BenchRow, DdimPayload, SprPayload, StretchPayload

console = Console(stderr=True)


def print_header(title: str, detail: str = "") -> None:
    """Print a minimal header."""
    console.print()
    console.print(f"[bold cyan]rv {title}[/bold cyan] [dim]{detail}[/dim]")


# =============================================================================
# STATUS
# =============================================================================

class StatusDisplay:
    """Simple context manager for showing status with spinner."""

    def __init__(self, message: str = "Running"):
        self.message = message
        self.live: Optional[Live] = None

    def __enter__(self) -> "StatusDisplay":
        self.live = Live(
            Spinner("dots", text=f" {self.message}..."),
            console=console,
            refresh_per_second=10,
            transient=True,
        )
        self.live.__enter__()
        return self

    def __exit__(self, *args: object) -> None:
        if self.live:
            self.live.__exit__(*args)


# =============================================================================
# REPORTS
# =============================================================================

def print_spr(payload: SprPayload, seconds: float) -> None:
    """Summarize a tree SPR run."""
    d = payload.distortion
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_row("terminals", str(len(payload.order)))
    table.add_row("magnitude", f"{payload.magnitude:g}")
    table.add_row("minor edges", str(len(payload.partition.minor.edges)))
    table.add_row("max distortion", f"{d.max_distortion:.6f}")
    if d.argmax_pair is not None:
        table.add_row("worst pair", f"{d.argmax_pair[0]} - {d.argmax_pair[1]}")
    if payload.bound is not None:
        table.add_row("bound", f"{payload.bound:g}")
    table.add_row("edge touches", str(payload.edge_touches))
    table.add_row("root in first cluster", "yes" if payload.root_in_first_cluster else "[yellow]no[/yellow]")
    table.add_row("time", f"{seconds:.3f}s")
    console.print(table)


def print_stretch(payload: StretchPayload, top: int) -> None:
    """Summarize an expected-stretch report with its worst pairs."""
    console.print(
        f"[bold]max mean stretch[/bold] {payload.max_mean_stretch:.4f} "
        f"[dim]({len(payload.pairs)} pairs, {payload.trials} trials, seed {payload.seed})[/dim]"
    )
    if payload.skipped_zero_pairs:
        print_warning(f"skipped {payload.skipped_zero_pairs} pairs at distance 0")
    worst = sorted(payload.pairs, key=lambda p: p.mean, reverse=True)[:top]
    if not worst:
        return
    table = Table(title="worst pairs")
    for column in ("x", "y", "d(x,y)", "mean", "variance"):
        table.add_column(column, justify="right")
    for p in worst:
        table.add_row(str(p.x), str(p.y), f"{p.distance:g}", f"{p.mean:.4f}", f"{p.variance:.4f}")
    console.print(table)


def print_bench(rows: List[BenchRow], timings: Dict[str, float]) -> None:
    """Print the bench sweep as a table."""
    table = Table(title="spr-tree bench")
    for column in ("family", "n", "k", "touches/n", "seconds", "t(n)/t(prev)"):
        table.add_column(column, justify="right")
    for row in rows:
        ratio = timings.get(f"ratio:n={row.n}")
        table.add_row(
            row.family,
            str(row.n),
            str(row.k),
            f"{row.touch_ratio:.3f}",
            f"{timings[f'n={row.n}']:.3f}",
            "-" if ratio is None else f"{ratio:.2f}",
        )
    console.print(table)


def print_ddim(payload: DdimPayload) -> None:
    console.print(f"[bold]ddim estimate[/bold] {payload.estimate:.3f} [dim](n={payload.n})[/dim]")


# =============================================================================
# MESSAGES
# =============================================================================

def print_error(message: str, detail: Optional[str] = None) -> None:
    """Print an error message."""
    console.print(f"\n[red]Error: {message}[/red]")
    if detail:
        console.print(f"[dim]{detail}[/dim]")
    console.print()


def print_warning(message: str) -> None:
    """Print a warning message."""
    console.print(f"[yellow]⚠ {message}[/yellow]")


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"[green]✓ {message}[/green]")
