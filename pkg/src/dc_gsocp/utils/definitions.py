"""
Type definitions for dc-gsocp.

Shared aliases keep signatures short across the numeric modules.
"""

from collections.abc import Callable
from enum import Enum
from os import PathLike as OsPathLike
from typing import Literal, TypeAlias, Union

import numpy as np
import numpy.typing as npt

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
ArrayOrScalar: TypeAlias = Union[FloatArray, float]

# Feedback policy used by the Monte Carlo oracle: (t, x) -> control values.
Policy: TypeAlias = Callable[[float, FloatArray], ArrayOrScalar]

PathLike: TypeAlias = Union[str, OsPathLike[str]]
LogLevel: TypeAlias = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class SchemeKind(str, Enum):
    """Lattice scheme used for the increments."""

    TRINOMIAL = "trinomial"
    GAUSS_HERMITE = "gauss_hermite"

    @classmethod
    def _missing_(cls, value: object) -> "SchemeKind | None":
        key = str(value).strip().lower().replace("-", "_")
        if key == "gh":
            return cls.GAUSS_HERMITE
        return next((member for member in cls if member.value == key), None)


class InterpMethod(str, Enum):
    """Interpolation between grid nodes."""

    LINEAR = "linear"
    CUBIC_MONOTONE = "cubic"
    CUBIC_SPLINE = "spline"


class GridScale(str, Enum):
    """How the grid spacing scales with the time step."""

    DELTA = "delta"
    SQRT_DELTA = "sqrt_delta"


class RunMode(str, Enum):
    """Experiment selected by the command line."""

    SOLVE = "solve"
    CONVERGE = "converge"
    RESIDUAL = "residual"
    ORACLE = "oracle"
