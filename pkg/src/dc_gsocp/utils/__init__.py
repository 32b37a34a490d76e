"""
dc-gsocp utilities.

Constants, type aliases, exceptions, logging and CSV formatting shared by the
numerical modules. CLI helpers live in :mod:`dc_gsocp.utils.cli` and are not
imported here.
"""

from .exceptions import (
    ConfigurationError,
    DomainError,
    GsocpError,
    InvalidParameterError,
    LatticeError,
    SolverError,
)
from .formatting import format_cell, format_float, read_rows, rows_to_text, write_rows
from .logging import StageTimer, get_logger, setup_logger, setup_logging

__all__ = [
    "ConfigurationError",
    "DomainError",
    "GsocpError",
    "InvalidParameterError",
    "LatticeError",
    "SolverError",
    "StageTimer",
    "format_cell",
    "format_float",
    "get_logger",
    "read_rows",
    "rows_to_text",
    "setup_logger",
    "setup_logging",
    "write_rows",
]
