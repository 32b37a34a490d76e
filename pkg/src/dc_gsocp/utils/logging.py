"""
Logging utilities for dc-gsocp.

Diagnostics go to stderr through rich; structlog sits on top of the stdlib
``dc_gsocp`` logger so library modules can log key-value events. Logfire is used
when it is installed and explicitly requested.
"""

import logging
import os
import time
from dataclasses import dataclass
from typing import Any

import structlog
from rich.console import Console
from rich.logging import RichHandler

from .definitions import LogLevel

DEBUG = logging.DEBUG
INFO = logging.INFO
WARNING = logging.WARNING

DEFAULT_LOG_LEVEL: LogLevel = "INFO"
ROOT_LOGGER_NAME = "dc_gsocp"

stderr_console = Console(stderr=True)

standard_logger = logging.getLogger(ROOT_LOGGER_NAME)
if not standard_logger.handlers:
    standard_logger.addHandler(logging.NullHandler())

__all__ = [
    "DEBUG",
    "INFO",
    "WARNING",
    "LogfireConfig",
    "StageTimer",
    "get_logger",
    "setup_logger",
    "setup_logging",
]


def _configure_structlog() -> None:
    if structlog.is_configured():
        return
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.KeyValueRenderer(
                key_order=["event"],
                sort_keys=True,
            ),
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def get_logger(name: str = ROOT_LOGGER_NAME) -> Any:
    """
    Get a structured logger bound to the stdlib logger ``name``.

    Args:
        name: Logger name, normally ``__name__`` of a ``dc_gsocp`` module

    Returns:
        structlog BoundLogger
    """
    _configure_structlog()
    return structlog.get_logger(name)


def setup_logger(
    name: str = ROOT_LOGGER_NAME,
    level: int | str = logging.INFO,
    *,
    console: bool = True,
    rich: bool = True,
) -> logging.Logger:
    """
    Set up the stdlib logger that structlog events end up in.

    Args:
        name: Logger name
        level: Logging level
        console: Whether to attach a stderr handler
        rich: Use rich formatting for the stderr handler

    Returns:
        logging.Logger: Configured logger
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)

    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.handlers = []

    if console:
        handler: logging.Handler
        if rich:
            handler = RichHandler(
                console=stderr_console,
                rich_tracebacks=True,
                markup=False,
                show_path=False,
            )
            handler.setFormatter(logging.Formatter("%(message)s"))
        else:
            handler = logging.StreamHandler(stderr_console.file)
            handler.setFormatter(
                logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"),
            )
        handler.setLevel(level)
        logger.addHandler(handler)
    else:
        logger.addHandler(logging.NullHandler())

    logger.propagate = False
    _configure_structlog()
    return logger


@dataclass
class LogfireConfig:
    """Configuration for optional Logfire export."""

    service_name: str = "dc-gsocp"
    environment: str | None = None
    level: str | None = None

    @classmethod
    def from_env(cls) -> "LogfireConfig":
        """Create configuration from environment variables."""
        return cls(
            service_name=os.environ.get("LOGFIRE_SERVICE_NAME", "dc-gsocp"),
            environment=os.environ.get("LOGFIRE_ENVIRONMENT", "dev"),
            level=os.environ.get("LOGFIRE_LOG_LEVEL", DEFAULT_LOG_LEVEL),
        )


def setup_logging(
    level: LogLevel = DEFAULT_LOG_LEVEL,
    *,
    use_logfire: bool = False,
    config: LogfireConfig | None = None,
) -> bool:
    """
    Initialize logging for a run.

    Args:
        level: Logging level
        use_logfire: Export through Logfire when the package is installed
        config: Logfire configuration (defaults to environment values)

    Returns:
        True when Logfire was configured, False for the stdlib path
    """
    logger = setup_logger(ROOT_LOGGER_NAME, level)
    if not use_logfire:
        return False

    try:
        import logfire
    except ImportError:
        logger.warning("Logfire requested but not installed; using stderr logging")
        return False

    cfg = config or LogfireConfig.from_env()
    logfire.configure(
        service_name=cfg.service_name,
        environment=cfg.environment,
        send_to_logfire="if-token-present",
    )
    logger.addHandler(logfire.LogfireLoggingHandler())
    return True


class StageTimer:
    """Context manager measuring a computation stage and logging its duration."""

    def __init__(self, stage: str, **context: Any) -> None:
        """
        Initialize the stage timer.

        Args:
            stage: Name of the timed stage
            **context: Extra key-value pairs attached to the log events
        """
        self.stage = stage
        self.context = context
        self.start_time = 0.0
        self.elapsed = 0.0
        self._logger = get_logger(f"{ROOT_LOGGER_NAME}.timing")

    def __enter__(self) -> "StageTimer":
        self.start_time = time.perf_counter()
        self._logger.debug("stage started", stage=self.stage, **self.context)
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.elapsed = time.perf_counter() - self.start_time
        duration_ms = self.elapsed * 1000
        if exc_type is None:
            self._logger.debug(
                "stage finished",
                stage=self.stage,
                duration_ms=round(duration_ms, 3),
                **self.context,
            )
        else:
            self._logger.error(
                "stage failed",
                stage=self.stage,
                duration_ms=round(duration_ms, 3),
                error=str(exc_val),
                error_type=exc_type.__name__,
                **self.context,
            )
