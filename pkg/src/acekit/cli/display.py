"""Rich display helpers for CLI output."""

from __future__ import annotations

import json

from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeRemainingColumn,
)
from rich.table import Table

from acekit.core.models import AceEstimate, McSummary, Scenario
from acekit.exceptions import AceKitError

console = Console()
error_console = Console(stderr=True)


def _fmt(value: float | None, digits: int = 4) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def print_summary(summary: McSummary) -> None:
    """Display Monte Carlo summaries in a table."""
    title = f"{summary.scenario or 'custom model'}: n={summary.n}, {summary.replicates} replicates"
    table = Table(title=title, border_style="cyan")
    table.add_column("Estimator", style="bold")
    table.add_column("Mean", justify="right")
    table.add_column("SD", justify="right")
    table.add_column("MSE", justify="right")
    table.add_column("Failures", justify="right")
    for item in summary.estimators:
        failures = str(item.failures) if item.failures else "[dim]0[/dim]"
        table.add_row(item.name, _fmt(item.mean), _fmt(item.sd), _fmt(item.mse), failures)
    console.print(table)
    console.print(f"[dim]True ACE: {summary.delta_true:.4f}, seed {summary.seed}[/dim]")


def print_estimate(estimate: AceEstimate) -> None:
    lines = [f"[bold]Estimate:[/bold] {estimate.estimate:.6f}"]
    if estimate.se is not None:
        lines.append(f"[bold]Std. error:[/bold] {estimate.se:.6f}")
    for key, value in estimate.diagnostics.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        lines.append(f"[dim]{key}: {value}[/dim]")
    console.print(Panel("\n".join(lines), title=f"[bold cyan]{estimate.method}[/bold cyan]"))


def print_scenarios(scenarios: list[Scenario]) -> None:
    """Display built-in scenarios in a table."""
    table = Table(title="Scenarios", border_style="cyan")
    table.add_column("Name", style="bold")
    table.add_column("Model")
    table.add_column("n", justify="right")
    table.add_column("Replicates", justify="right")
    table.add_column("Description")
    for item in scenarios:
        table.add_row(
            item.name, item.model.family, str(item.n), str(item.replicates), item.description
        )
    console.print(table)


def print_methods(methods: list) -> None:
    """Display registered estimation methods in a table."""
    table = Table(title="Methods", border_style="cyan")
    table.add_column("Method", style="bold")
    table.add_column("Description")
    for method in methods:
        table.add_row(method.method_name, method.description)
    console.print(table)


def print_multipliers(multipliers: dict[str, float]) -> None:
    table = Table(title="Asymptotic variance multipliers (n Var)", border_style="cyan")
    table.add_column("Adjustment", style="bold")
    table.add_column("Multiplier", justify="right")
    for key, value in multipliers.items():
        table.add_row(key, f"{value:g}")
    console.print(table)


def create_progress() -> Progress:
    """Create a progress bar for Monte Carlo replicates."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeRemainingColumn(),
        console=error_console,
    )


def print_success(message: str) -> None:
    console.print(f"[bold green]{message}[/bold green]")


def emit_error(exc: AceKitError) -> None:
    """Write a machine-readable error document to stderr."""
    document = {"error": type(exc).__name__, "message": str(exc), **exc.context()}
    error_console.print(
        json.dumps(document), markup=False, highlight=False, emoji=False, soft_wrap=True
    )


def print_json(text: str) -> None:
    """Write raw JSON to stdout without styling or wrapping."""
    console.print(text, markup=False, highlight=False, emoji=False, soft_wrap=True)
