"""
Spatial discretization for the backward scheme.

Grids are uniform and share a common spacing and origin across time levels, so
nodes of different levels coincide. Values between nodes come from linear,
monotone cubic or natural cubic-spline interpolation; queries outside a grid are
clamped to the boundary node and counted.
"""

import threading
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from math import ceil, floor, sqrt
from pathlib import Path
from typing import Any, TextIO, overload

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .lattice import LatticeFamily
from .problem.spec import ProblemSpec, evaluate_coefficients
from .utils.constants import (
    CLAMP_TOLERANCE,
    FIELD_HEADER,
    GRID_NODES_ERROR,
    GRID_SPACING_ERROR,
    NODE_SNAP_TOLERANCE,
)
from .utils.definitions import FloatArray, IntArray, InterpMethod, PathLike
from .utils.exceptions import (
    CoefficientEvaluationError,
    DomainGrowthError,
    InvalidParameterError,
)
from .utils.formatting import write_rows
from .utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Uniform grid ``lo + j * spacing`` for ``j = 0 .. n_nodes - 1``."""

    lo: float
    hi: float
    n_nodes: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise InvalidParameterError(GRID_NODES_ERROR)
        if self.lo >= self.hi or self.n_nodes < 2:
            raise InvalidParameterError(GRID_NODES_ERROR)

    @classmethod
    def aligned(cls, lo: float, hi: float, origin: float, spacing: float) -> "Grid1D":
        """Smallest grid on the nodes ``origin + j * spacing`` covering ``[lo, hi]``."""
        if not spacing > 0.0:
            raise InvalidParameterError(GRID_SPACING_ERROR.format(spacing))
        first = floor((lo - origin) / spacing + NODE_SNAP_TOLERANCE)
        last = ceil((hi - origin) / spacing - NODE_SNAP_TOLERANCE)
        last = max(last, first + 1)
        return cls(origin + first * spacing, origin + last * spacing, last - first + 1)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n_nodes - 1)

    @cached_property
    def nodes(self) -> FloatArray:
        nodes = self.lo + self.spacing * np.arange(self.n_nodes, dtype=np.float64)
        nodes[-1] = self.hi
        nodes.setflags(write=False)
        return nodes

    def nearest_index(self, x: float) -> int:
        return int(np.clip(round((x - self.lo) / self.spacing), 0, self.n_nodes - 1))


class ClampCounter:
    """Thread-safe count of interpolation queries that fell outside a grid."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def add(self, count: int) -> None:
        if count:
            with self._lock:
                self._count += count

    @property
    def value(self) -> int:
        return self._count


@dataclass(frozen=True, eq=False)
class ValueField:
    """Value function at time level ``time_index`` sampled on ``grid``.

    ``policy`` holds one (control index, sigma-level index) pair per node.
    """

    grid: Grid1D
    values: FloatArray
    time_index: int
    policy: IntArray | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.grid.n_nodes,):
            raise InvalidParameterError("field values must match the grid")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.policy is not None:
            policy = np.array(self.policy, dtype=np.int64)
            if policy.shape != (self.grid.n_nodes, 2) or np.any(policy < 0):
                raise InvalidParameterError("policy must hold index pairs per node")
            policy.setflags(write=False)
            object.__setattr__(self, "policy", policy)

    @cached_property
    def cubic_interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.grid.nodes, self.values, extrapolate=False)

    @cached_property
    def spline_interpolant(self) -> CubicSpline:
        return CubicSpline(self.grid.nodes, self.values, bc_type="natural")

    def to_csv(
        self,
        target: PathLike | TextIO,
        controls: Sequence[float] | FloatArray,
        sigma_levels: Sequence[float] | FloatArray,
    ) -> None:
        """Write ``x, value, argmax_control, argmax_sigma`` rows."""
        write_field_csv(self, target, controls, sigma_levels)


@overload
def interpolate(
    field: ValueField,
    x: float,
    method: InterpMethod = ...,
    counter: ClampCounter | None = ...,
) -> float: ...


@overload
def interpolate(
    field: ValueField,
    x: FloatArray,
    method: InterpMethod = ...,
    counter: ClampCounter | None = ...,
) -> FloatArray: ...


def interpolate(
    field: ValueField,
    x: Any,
    method: InterpMethod = InterpMethod.LINEAR,
    counter: ClampCounter | None = None,
) -> Any:
    """
    Evaluate a value field between its nodes.

    Queries outside ``[lo, hi]`` return the boundary value and are counted on
    ``counter``.

    Args:
        field: Field to evaluate
        x: Query point or array of points (any shape)
        method: Linear, monotone cubic or natural cubic spline
        counter: Optional clamp counter

    Returns:
        Float for scalar input, otherwise an array shaped like ``x``
    """
    grid = field.grid
    query = np.asarray(x, dtype=np.float64)
    spacing = grid.spacing

    if counter is not None:
        slack = CLAMP_TOLERANCE * spacing
        outside = (query < grid.lo - slack) | (query > grid.hi + slack)
        counter.add(int(np.count_nonzero(outside)))

    method = InterpMethod(method)
    if method is InterpMethod.CUBIC_MONOTONE:
        result = field.cubic_interpolant(np.clip(query, grid.lo, grid.hi))
    elif method is InterpMethod.CUBIC_SPLINE:
        result = field.spline_interpolant(np.clip(query, grid.lo, grid.hi))
    else:
        position = np.clip((query - grid.lo) / spacing, 0.0, grid.n_nodes - 1.0)
        index = np.minimum(position.astype(np.int64), grid.n_nodes - 2)
        theta = position - index
        left = field.values[index]
        result = left + theta * (field.values[index + 1] - left)

    if query.ndim == 0:
        return float(result)
    return result


def reachable_domains(
    problem: ProblemSpec,
    x0: float,
    n_steps: int,
    family: LatticeFamily,
    delta: float,
    *,
    controls: FloatArray | None = None,
    spacing: float | None = None,
    truncation_radius: float | None = None,
) -> list[tuple[float, float]]:
    """
    Enclose the states reachable at each time level.

    Level ``k+1`` extends level ``k`` by
    ``r_k = delta*sup|b| + sqrt(delta)*p_max*sup|sigma| + delta*p_max**2*sup|h|``,
    the suprema taken over the sampled controls and every state node of level
    ``k``. With a ``spacing`` the nodes are those of the aligned grid covering
    level ``k``, which are exactly the states the solver steps from. Otherwise
    they are evenly spaced no more than ``delta`` apart, endpoints included.

    Returns:
        ``[(lo, hi)]`` for levels ``0 .. n_steps``

    Raises:
        DomainGrowthError: If a coefficient or the radius is not finite
    """
    if controls is None:
        controls = problem.controls.sample()
    p_max = family.max_abs_point
    root_delta = sqrt(delta)
    levels = [(float(x0), float(x0))]

    for k in range(n_steps):
        lo, hi = levels[-1]
        if spacing is not None:
            states = Grid1D.aligned(lo, hi, x0, spacing).nodes
        else:
            states = np.linspace(lo, hi, max(2, ceil((hi - lo) / delta) + 1))

        try:
            coeffs = evaluate_coefficients(
                problem,
                k * delta,
                states[:, None],
                controls[None, :],
            )
        except CoefficientEvaluationError as exc:
            raise DomainGrowthError(k + 1) from exc

        sup_b = float(np.max(np.abs(coeffs.drift)))
        sup_sigma = float(np.max(np.abs(coeffs.diffusion)))
        sup_h = float(np.max(np.abs(coeffs.quad_drift)))
        radius = (
            delta * sup_b + root_delta * p_max * sup_sigma + delta * p_max**2 * sup_h
        )
        if not np.isfinite(radius):
            raise DomainGrowthError(k + 1)

        if problem.growth_bound is not None:
            envelope = problem.growth_bound * (1.0 + float(np.max(np.abs(states))))
            if max(sup_b, sup_sigma, sup_h) > envelope:
                logger.warning(
                    "coefficient exceeds declared growth bound",
                    problem=problem.name,
                    level=k,
                    bound=envelope,
                )

        new_lo = float(states.min()) - radius
        new_hi = float(states.max()) + radius
        if truncation_radius is not None:
            new_lo = max(new_lo, x0 - truncation_radius)
            new_hi = min(new_hi, x0 + truncation_radius)
        levels.append((new_lo, new_hi))

    return levels


def reachable_domain(
    problem: ProblemSpec,
    x0: float,
    n_steps: int,
    family: LatticeFamily,
    delta: float,
    **kwargs: Any,
) -> tuple[float, float]:
    """Enclosure of the states reachable after ``n_steps`` steps."""
    return reachable_domains(problem, x0, n_steps, family, delta, **kwargs)[-1]


def write_field_csv(
    field: ValueField,
    target: PathLike | TextIO,
    controls: Sequence[float] | FloatArray,
    sigma_levels: Sequence[float] | FloatArray,
) -> None:
    """Write a value field with its argmax policy as CSV."""
    controls = np.asarray(controls, dtype=np.float64)
    sigma_levels = np.asarray(sigma_levels, dtype=np.float64)

    def rows() -> Any:
        for j, (x, v) in enumerate(zip(field.grid.nodes, field.values, strict=True)):
            if field.policy is None:
                yield (float(x), float(v), float("nan"), float("nan"))
            else:
                ci, si = field.policy[j]
                yield (float(x), float(v), float(controls[ci]), float(sigma_levels[si]))

    if hasattr(target, "write"):
        write_rows(target, FIELD_HEADER, rows())
    else:
        with Path(target).open("w", encoding="utf-8", newline="") as stream:
            write_rows(stream, FIELD_HEADER, rows())
