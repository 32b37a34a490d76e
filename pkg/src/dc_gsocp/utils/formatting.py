"""
CSV formatting helpers for dc-gsocp.

All numbers are written in scientific notation with 9 significant digits using
plain ``str.format`` so output never depends on the process locale.
"""

import csv
import io
from collections.abc import Iterable, Sequence
from typing import TextIO

from .constants import CSV_FLOAT_FORMAT, CSV_PARSE_ERROR


def format_float(value: float) -> str:
    """Format a float with 9 significant digits in scientific notation."""
    return CSV_FLOAT_FORMAT.format(float(value))


def format_cell(value: object) -> str:
    """Format a CSV cell: integers verbatim, floats in scientific notation."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_rows(
    stream: TextIO,
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> None:
    """Write a header and rows as comma-separated lines with LF endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])


def rows_to_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Render rows to a CSV string."""
    buffer = io.StringIO()
    write_rows(buffer, header, rows)
    return buffer.getvalue()


def read_rows(text: str) -> tuple[list[str], list[list[str]]]:
    """Split CSV text into its header and the remaining rows.

    Raises:
        ValueError: If the text holds no header line
    """
    lines = list(csv.reader(io.StringIO(text)))
    if not lines:
        raise ValueError(CSV_PARSE_ERROR.format("empty document"))
    return lines[0], [line for line in lines[1:] if line]
