"""Output formatting utilities for dynbundle."""

import json
import math
import sys
from typing import Any, Optional

import click
from rich.console import Console
from rich.table import Table
from rich.syntax import Syntax

from dynbundle_cli.errors import OutputError


console = Console()
error_console = Console(stderr=True)


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats with strings so the JSON stays strict."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def output(data: Any, format: str = "json", title: Optional[str] = None, file_path: Optional[str] = None) -> None:
    """
    Output data in the specified format.

    Args:
        data: Data to output (dict or list of dicts).
        format: Output format ('json' or 'table').
        title: Optional title for table output.
        file_path: Optional file path to write clean JSON to.
    """
    if file_path:
        _write_to_file(data, file_path)
        return

    if format == "table":
        output_table(data, title=title)
    else:
        output_json(data)


def output_json(data: Any) -> None:
    """Output data as formatted JSON."""
    json_str = json.dumps(_jsonable(data), indent=2, default=str)
    if sys.stdout.isatty():
        syntax = Syntax(json_str, "json", theme="monokai", word_wrap=True)
        console.print(syntax)
    else:
        print(json_str)


def _cell(val: Any) -> str:
    if isinstance(val, float):
        return f"{val:.6g}"
    if isinstance(val, (dict, list)):
        val = json.dumps(_jsonable(val), default=str)
    elif val is None:
        return ""
    val = str(val)
    if len(val) > 60:
        val = val[:57] + "..."
    return val


def output_table(data: Any, title: Optional[str] = None) -> None:
    """
    Output data as a rich table.

    A single dict becomes a two-column key/value table, a list of dicts
    one row per dict.
    """
    if data is None:
        console.print("[dim]No data[/dim]")
        return

    if isinstance(data, dict):
        table = Table(title=title, show_header=True, header_style="bold cyan")
        table.add_column("key")
        table.add_column("value", overflow="fold")
        for key, val in data.items():
            table.add_row(str(key), _cell(val))
        console.print(table)
        return

    if not isinstance(data, list):
        console.print("[dim]Cannot display as table[/dim]")
        output_json(data)
        return

    if not data:
        console.print("[dim]No results[/dim]")
        return

    table = Table(title=title, show_header=True, header_style="bold cyan")
    columns = list(data[0].keys())
    for col in columns:
        table.add_column(col, overflow="fold")
    for row in data:
        table.add_row(*(_cell(row.get(col, "")) for col in columns))

    console.print(table)


def output_error(message: str, details: Optional[dict] = None) -> None:
    """
    Output an error message.

    Args:
        message: Error message to display.
        details: Optional error details.
    """
    error_console.print(f"[bold red]Error:[/bold red] {message}")
    if details:
        error_console.print(f"[dim]{json.dumps(_jsonable(details), indent=2, default=str)}[/dim]")


def output_success(message: str) -> None:
    """Output a success message."""
    error_console.print(f"[bold green]Success:[/bold green] {message}")


def output_warning(message: str) -> None:
    """Output a warning message."""
    error_console.print(f"[bold yellow]Warning:[/bold yellow] {message}")


def output_info(message: str) -> None:
    """Output an info message."""
    error_console.print(f"[bold blue]Info:[/bold blue] {message}")


def _write_to_file(data: Any, file_path: str) -> None:
    """Write clean JSON to a file (no Rich/ANSI formatting).

    Raises:
        OutputError: If the file cannot be written.
    """
    try:
        with open(file_path, "w") as f:
            json.dump(_jsonable(data), f, indent=2, default=str)
            f.write("\n")
    except OSError as exc:
        raise OutputError(f"cannot write output: {exc.strerror or exc}", path=file_path) from exc

    click.echo(f"Output written to: {file_path}", err=True)
