"""
Backward dynamic programming on lattice increments.

At each level the value of a node is the maximum, over sampled controls and
family members, of the expected next-level value at the successors
``x + b*delta + sigma*sqrt(delta)*p + h*delta*p**2`` plus the running reward.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, sqrt
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .grid import ClampCounter, Grid1D, ValueField, interpolate, reachable_domains
from .lattice import LatticeFamily, make_family
from .problem.spec import Coefficients, GParams, ProblemSpec, evaluate_coefficients
from .utils.constants import (
    DEFAULT_CHUNK_ELEMENTS,
    DEFAULT_EXTRA_LEVELS,
    DEFAULT_GH_ORDER,
    DEFAULT_GRID_FACTOR,
    NODE_SNAP_TOLERANCE,
)
from .utils.definitions import FloatArray, GridScale, InterpMethod, SchemeKind
from .utils.exceptions import (
    DomainViolationError,
    InvalidParameterError,
    PolicyNotRecordedError,
)
from .utils.logging import StageTimer, get_logger

logger = get_logger(__name__)


class SolverConfig(BaseModel):
    """Discretization and execution settings for one solve."""

    model_config = ConfigDict(frozen=True)

    n_steps: int = Field(ge=1, description="Number of time steps N")
    scheme: SchemeKind = SchemeKind.TRINOMIAL
    gh_order: int = DEFAULT_GH_ORDER
    extra_levels: int = Field(default=DEFAULT_EXTRA_LEVELS, ge=0)
    control_samples: int | None = Field(default=None, ge=1)
    grid_factor: float = Field(default=DEFAULT_GRID_FACTOR, gt=0.0)
    grid_scale: GridScale = GridScale.DELTA
    grid_spacing: float | None = Field(default=None, gt=0.0)
    truncation_radius: float | None = Field(default=None, gt=0.0)
    interp: InterpMethod = InterpMethod.LINEAR
    strict_domain: bool = False
    record_policy: bool = True
    workers: int = Field(default=1, ge=1)
    chunk_elements: int = Field(default=DEFAULT_CHUNK_ELEMENTS, ge=1)

    def delta(self, horizon: float) -> float:
        return horizon / self.n_steps

    def family(self, gparams: GParams) -> LatticeFamily:
        return make_family(
            self.scheme,
            gparams.sigma_lo,
            gparams.sigma_hi,
            self.extra_levels,
            order=self.gh_order,
        )


@dataclass(frozen=True, eq=False)
class SolveResult:
    """Value fields for levels ``0 .. N`` and the value at the start point."""

    value_at_start: float
    fields: tuple[ValueField, ...]
    clamp_count: int
    wall_time: float
    x0: float
    delta: float
    controls: FloatArray
    sigma_levels: FloatArray

    @property
    def n_steps(self) -> int:
        return len(self.fields) - 1

    def feedback_policy(self) -> Callable[[float, FloatArray], FloatArray]:
        """Recorded argmax control as a vectorized feedback ``(t, x) -> a``."""

        def policy(t: float, x: FloatArray) -> FloatArray:
            field = _policy_field(self, t)
            assert field.policy is not None
            grid = field.grid
            index = np.clip(
                np.rint((np.asarray(x) - grid.lo) / grid.spacing),
                0,
                grid.n_nodes - 1,
            ).astype(np.int64)
            return self.controls[field.policy[index, 0]]

        _policy_field(self, 0.0)
        return policy


def resolve_spacing(cfg: SolverConfig, delta: float) -> float:
    """
    Grid spacing for a step size.

    An explicit ``grid_spacing`` wins. Otherwise the target ``grid_factor * delta``
    (or ``grid_factor * sqrt(delta)`` under ``GridScale.SQRT_DELTA``) is shrunk to
    the nearest ``sqrt(delta) / q`` for an integer ``q``, so unit lattice
    increments of state-independent problems land on nodes.
    """
    if cfg.grid_spacing is not None:
        return cfg.grid_spacing
    root = sqrt(delta)
    if cfg.grid_scale is GridScale.SQRT_DELTA:
        target = cfg.grid_factor * root
    else:
        target = cfg.grid_factor * delta
    q = max(1, ceil(root / target - NODE_SNAP_TOLERANCE))
    return root / q


def successor_block(
    problem: ProblemSpec,
    t: float,
    x: FloatArray,
    controls: FloatArray,
    family: LatticeFamily,
    delta: float,
) -> tuple[Coefficients, FloatArray]:
    """
    Successors of every (state, control, member, point) combination.

    Returns:
        Coefficients on the ``(states, controls)`` block and successor states of
        shape ``(states, controls, members, points)``
    """
    coeffs = evaluate_coefficients(problem, t, x[:, None], controls[None, :])
    points = family.points_matrix
    base = (x[:, None] + coeffs.drift * delta)[:, :, None, None]
    noise = (coeffs.diffusion * sqrt(delta))[:, :, None, None] * points
    quad = (coeffs.quad_drift * delta)[:, :, None, None] * (points * points)
    return coeffs, base + noise + quad


def successor(
    x: float,
    t: float,
    a: float,
    p: float,
    delta: float,
    problem: ProblemSpec,
) -> float:
    """``x + b*delta + sigma*sqrt(delta)*p + h*delta*p**2`` at ``(t, x, a)``."""
    if delta <= 0.0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    coeffs = evaluate_coefficients(problem, t, np.array([x]), np.array([a]))
    return float(
        x
        + coeffs.drift[0] * delta
        + coeffs.diffusion[0] * sqrt(delta) * p
        + coeffs.quad_drift[0] * delta * p * p,
    )


def backward_step(
    next_field: ValueField,
    n: int,
    problem: ProblemSpec,
    family: LatticeFamily,
    cfg: SolverConfig,
    *,
    grid: Grid1D | None = None,
    controls: FloatArray | None = None,
    counter: ClampCounter | None = None,
) -> ValueField:
    """
    One backward step from level ``n + 1`` to level ``n``.

    Nodes are processed in independent blocks, optionally on worker threads;
    each block writes only its own slice. Ties go to the lowest control index,
    then the lowest sigma index.

    Args:
        next_field: Field at level ``n + 1``
        n: Level being computed
        problem: Control problem
        family: Lattice family
        cfg: Solver configuration
        grid: Grid for level ``n`` (defaults to the next field's grid)
        controls: Control samples (defaults to the problem's sample)
        counter: Accumulates clamped interpolation queries

    Raises:
        DomainViolationError: In strict mode, if any successor left the grid
    """
    if next_field.time_index != n + 1:
        raise InvalidParameterError(
            f"next field is level {next_field.time_index}, expected {n + 1}",
        )
    grid = grid or next_field.grid
    if controls is None:
        controls = problem.controls.sample(cfg.control_samples)

    delta = cfg.delta(problem.horizon)
    t = n * delta
    n_members, n_points = family.points_matrix.shape
    n_controls = controls.size
    probs = family.probs_matrix
    nodes = grid.nodes

    values = np.empty(grid.n_nodes)
    policy = np.empty((grid.n_nodes, 2), dtype=np.int64) if cfg.record_policy else None
    step_counter = ClampCounter()

    block = max(1, cfg.chunk_elements // (n_controls * n_members * n_points))
    blocks = [
        slice(s, min(s + block, grid.n_nodes)) for s in range(0, grid.n_nodes, block)
    ]

    def run_block(rows: slice) -> None:
        coeffs, targets = successor_block(
            problem,
            t,
            nodes[rows],
            controls,
            family,
            delta,
        )
        continuation = interpolate(next_field, targets, cfg.interp, step_counter)
        expected = np.einsum("jmkl,kl->jmk", continuation, probs)
        expected += (coeffs.running_cost * delta)[:, :, None]
        flat = expected.reshape(expected.shape[0], n_controls * n_members)
        best = np.argmax(flat, axis=1)
        values[rows] = flat[np.arange(flat.shape[0]), best]
        if policy is not None:
            policy[rows, 0] = best // n_members
            policy[rows, 1] = best % n_members

    if cfg.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            list(pool.map(run_block, blocks))
    else:
        for rows in blocks:
            run_block(rows)

    clamps = step_counter.value
    if counter is not None:
        counter.add(clamps)
    if cfg.strict_domain and clamps:
        raise DomainViolationError(n, clamps)

    logger.debug("backward step", level=n, nodes=grid.n_nodes, clamps=clamps)
    return ValueField(grid=grid, values=values, time_index=n, policy=policy)


def solve(problem: ProblemSpec, x0: float, cfg: SolverConfig) -> SolveResult:
    """
    Solve the discrete scheme from the horizon back to time 0.

    Each level gets its own grid on the common lattice ``x0 + j * spacing``
    covering that level's reachable domain (optionally truncated).

    Args:
        problem: Control problem
        x0: Initial state
        cfg: Solver configuration

    Returns:
        SolveResult with all value fields and ``value_at_start`` at ``x0``
    """
    problem.require_scalar_state()
    delta = cfg.delta(problem.horizon)
    family = cfg.family(problem.gparams)
    controls = problem.controls.sample(cfg.control_samples)
    spacing = resolve_spacing(cfg, delta)
    counter = ClampCounter()

    with StageTimer("solve", problem=problem.name, n_steps=cfg.n_steps) as timer:
        domains = reachable_domains(
            problem,
            x0,
            cfg.n_steps,
            family,
            delta,
            controls=controls,
            spacing=spacing,
            truncation_radius=cfg.truncation_radius,
        )
        grids = [Grid1D.aligned(lo, hi, x0, spacing) for lo, hi in domains]

        terminal_grid = grids[-1]
        fields: list[Any] = [None] * (cfg.n_steps + 1)
        fields[-1] = ValueField(
            grid=terminal_grid,
            values=problem.terminal_values(terminal_grid.nodes),
            time_index=cfg.n_steps,
        )
        for n in range(cfg.n_steps - 1, -1, -1):
            fields[n] = backward_step(
                fields[n + 1],
                n,
                problem,
                family,
                cfg,
                grid=grids[n],
                controls=controls,
                counter=counter,
            )
        value = interpolate(fields[0], float(x0), cfg.interp)

    logger.info(
        "solve finished",
        problem=problem.name,
        n_steps=cfg.n_steps,
        scheme=cfg.scheme.value,
        nodes=terminal_grid.n_nodes,
        value=value,
        clamps=counter.value,
    )
    return SolveResult(
        value_at_start=value,
        fields=tuple(fields),
        clamp_count=counter.value,
        wall_time=timer.elapsed,
        x0=float(x0),
        delta=delta,
        controls=controls,
        sigma_levels=family.sigma_levels,
    )


def _policy_field(result: SolveResult, t: float) -> ValueField:
    level = int(np.clip(round(t / result.delta), 0, result.n_steps - 1))
    field = result.fields[level]
    if field.policy is None:
        raise PolicyNotRecordedError
    return field


def extract_policy(result: SolveResult, t: float, x: float) -> tuple[float, float]:
    """
    Recorded argmax at the nearest node of the nearest level.

    Returns:
        ``(control value, sigma level)``

    Raises:
        PolicyNotRecordedError: If the solve ran without policy recording
    """
    field = _policy_field(result, t)
    assert field.policy is not None
    control_index, sigma_index = field.policy[field.grid.nearest_index(x)]
    control = float(result.controls[control_index])
    return control, float(result.sigma_levels[sigma_index])
