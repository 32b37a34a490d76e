"""
Pytest configuration file.

Fixtures shared by the dc-gsocp test suites.
"""

import logging
import os
import tempfile
from collections.abc import Generator
from pathlib import Path

import pytest

from dc_gsocp.problem import (
    ExactSolution,
    ProblemSpec,
    builtin_gheat,
    builtin_lq,
    builtin_sine,
)
from dc_gsocp.problem.registry import get_registry


def pytest_configure(config) -> None:
    """Register test markers."""
    markers = [
        "unit: marks tests as unit tests",
        "integration: marks tests checking the solver against independent oracles",
        "functional: marks tests reproducing end-to-end numerical results",
        "performance: marks tests for performance benchmarking",
        "slow: marks tests as slow (deselect with '-m \"not slow\"')",
    ]
    for marker in markers:
        config.addinivalue_line("markers", marker)


# -----------------------------------------------------------------------------
# Environment
# -----------------------------------------------------------------------------


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch) -> None:
    """Remove GSOCP_* variables so settings come only from the test."""
    for key in list(os.environ):
        if key.upper().startswith("GSOCP_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture(autouse=True)
def reset_package_logger() -> Generator[None, None, None]:
    """Let package log records reach caplog even after CLI setup ran."""
    logger = logging.getLogger("dc_gsocp")
    saved = (logger.handlers[:], logger.level, logger.propagate)
    logger.handlers = [logging.NullHandler()]
    logger.setLevel(logging.NOTSET)
    logger.propagate = True
    yield
    handlers, level, propagate = saved
    logger.handlers = handlers
    logger.setLevel(level)
    logger.propagate = propagate


@pytest.fixture
def fresh_registry() -> Generator[None, None, None]:
    """Rebuild the problem registry before and after the test."""
    get_registry(reload=True)
    yield
    get_registry(reload=True)


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def captured_logs(caplog) -> pytest.LogCaptureFixture:
    """Capture package logs at DEBUG level."""
    caplog.set_level(logging.DEBUG)
    return caplog


# -----------------------------------------------------------------------------
# Problems
# -----------------------------------------------------------------------------


@pytest.fixture
def gheat() -> tuple[ProblemSpec, ExactSolution]:
    return builtin_gheat()


@pytest.fixture
def lq() -> tuple[ProblemSpec, ExactSolution]:
    return builtin_lq()


@pytest.fixture
def sine() -> tuple[ProblemSpec, ExactSolution]:
    return builtin_sine()
