"""CLI output formatting helpers."""

from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn
from rich.table import Table

console = Console()


def format_seconds(seconds: float) -> str:
    """Format a duration in seconds as s, min, h or days."""
    if seconds < 60:
        return f"{seconds:.3g} s"
    elif seconds < 3600:
        return f"{seconds / 60:.3g} min"
    elif seconds < 86400:
        return f"{seconds / 3600:.3g} h"
    else:
        return f"{seconds / 86400:.3g} d"


def format_value(value: float) -> str:
    """Compact scientific formatting for parameter tables."""
    if value == 0.0:
        return "0"
    if 1e-3 <= abs(value) < 1e4:
        return f"{value:.4g}"
    return f"{value:.3e}"


def create_progress() -> Progress:
    """Create a Rich progress bar for training and simulation loops."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console,
    )


def parameters_table(title: str, columns: dict[str, dict[str, float]]) -> Table:
    """One row per parameter, one column per named value set."""
    table = Table(title=title)
    table.add_column("Parameter", style="cyan")
    for name in columns:
        table.add_column(name, justify="right")
    keys: list[str] = []
    for values in columns.values():
        keys.extend(k for k in values if k not in keys)
    for key in keys:
        table.add_row(key, *(format_value(v[key]) if key in v else "-" for v in columns.values()))
    return table


def print_success(message: str) -> None:
    """Print success message."""
    console.print(f"[green]✓[/green] {message}")


def print_warning(message: str) -> None:
    """Print warning message."""
    console.print(f"[yellow]⚠[/yellow] {message}")


def print_error(message: str) -> None:
    """Print error message."""
    console.print(f"[red]✗[/red] {message}")


def print_info(message: str) -> None:
    """Print info message."""
    console.print(f"[blue]ℹ[/blue] {message}")
