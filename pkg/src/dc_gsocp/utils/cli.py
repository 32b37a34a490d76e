"""
CLI utilities for dc-gsocp.

Error handling, rich panels and report output shared by the commands in
:mod:`dc_gsocp.cli`.
"""

import functools
import os
import sys
import traceback
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import doctyper
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table
from rich.text import Text

from .constants import DEBUG_ENV_VAR
from .exceptions import (
    ConfigurationError,
    DomainError,
    GsocpError,
    InvalidParameterError,
    LatticeError,
    SolverError,
    UnknownProblemError,
)
from .logging import stderr_console

console = stderr_console


def debug_enabled() -> bool:
    return os.environ.get(DEBUG_ENV_VAR, "").lower() in ("1", "true", "yes")


def handle_common_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Decorator turning library errors into a red message and exit code 1.

    Args:
        func: The command to decorate

    Returns:
        Decorated command
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except ConfigurationError as e:
            console.print(f"[red]Configuration error: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except UnknownProblemError as e:
            console.print(f"[red]Unknown problem: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except LatticeError as e:
            console.print(f"[red]Lattice error: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except (DomainError, InvalidParameterError) as e:
            console.print(f"[red]Invalid parameter: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except SolverError as e:
            console.print(f"[red]Solver error: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except GsocpError as e:
            console.print(f"[red]Error: {e}[/red]")
            raise doctyper.Exit(code=1) from e
        except Exception as e:  # noqa: BLE001
            console.print(f"[red]Error: {e}[/red]")
            if debug_enabled():
                console.print(traceback.format_exc())
            raise doctyper.Exit(code=1) from e

    return wrapper


def output_result(text: str, output_file: Path | None = None) -> None:
    """
    Write report text to a file or stdout.

    Args:
        text: Rendered report
        output_file: Destination (stdout when None)
    """
    if output_file is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output_file.parent.mkdir(parents=True, exist_ok=True)
    with output_file.open("w", encoding="utf-8", newline="") as f:
        f.write(text)
    console.print(f"Output saved to {output_file}")


def create_error_panel(message: str | Text, title: str = "Error") -> Panel:
    if isinstance(message, str):
        text = Text("✗ ", style="bold red")
        text.append(message, style="red")
        message = text
    return Panel(message, title=title, border_style="red", padding=(1, 2))


def create_info_panel(message: str | Text, title: str = "Information") -> Panel:
    return Panel(message, title=title, border_style="blue", padding=(1, 2))


def create_problem_table(rows: list[tuple[str, str, dict[str, float]]]) -> Table:
    """Table of registered problems with their default parameters."""
    table = Table(title="Registered problems", header_style="bold cyan")
    table.add_column("Name")
    table.add_column("Description")
    table.add_column("Defaults")
    for name, description, defaults in rows:
        table.add_row(
            name,
            description,
            ", ".join(f"{key}={value:g}" for key, value in defaults.items()),
        )
    return table


@contextmanager
def spinner_context(message: str = "Solving...") -> Iterator[Progress]:
    """Indeterminate spinner on stderr while a long computation runs."""
    with Progress(
        SpinnerColumn(),
        TextColumn(f"[bold blue]{message}"),
        console=console,
        transient=True,
    ) as progress:
        progress.add_task("", total=None)
        yield progress
