"""
Controlled system, payoff and the scalar G function.

Coefficient callables take a scalar time and numpy arrays of states and controls
and must broadcast: ``b(t, x[:, None], a[None, :])`` yields one value per
(state, control) pair. Scalars are accepted and broadcast by the evaluator.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.constants import (
    CONTROL_EMPTY_ERROR,
    CONTROL_INTERVAL_ERROR,
    CONTROL_SAMPLES_ERROR,
    DEFAULT_CONTROL_SAMPLES,
    DEFAULT_FD_STEP,
    FD_STEP_ERROR,
    RESIDUAL_CONTROL_SAMPLES,
    RESIDUAL_TIME_ERROR,
    SIGMA_FINITE_ERROR,
    SIGMA_ORDER_ERROR,
)
from ..utils.definitions import ArrayOrScalar, FloatArray
from ..utils.exceptions import (
    CoefficientEvaluationError,
    DomainError,
    InvalidParameterError,
    UnsupportedDimensionError,
)


class GParams(BaseModel):
    """Volatility bounds of the one-dimensional G-Brownian motion."""

    model_config = ConfigDict(frozen=True)

    sigma_lo: float = Field(ge=0.0, description="Lower volatility bound")
    sigma_hi: float = Field(ge=0.0, description="Upper volatility bound")

    @model_validator(mode="after")
    def validate_bounds(self) -> "GParams":
        if not np.isfinite(self.sigma_hi):
            raise ValueError(SIGMA_FINITE_ERROR)
        if self.sigma_lo > self.sigma_hi:
            raise ValueError(SIGMA_ORDER_ERROR.format(self.sigma_lo, self.sigma_hi))
        return self


class ControlSet(BaseModel):
    """Control values searched by the scheme.

    Either an interval ``[lo, hi]`` sampled at ``samples`` equally spaced points
    or an explicit tuple of points.
    """

    model_config = ConfigDict(frozen=True)

    lo: float | None = None
    hi: float | None = None
    samples: int = Field(default=DEFAULT_CONTROL_SAMPLES, ge=1)
    points: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def validate_shape(self) -> "ControlSet":
        if self.points is not None:
            if not self.points:
                raise ValueError(CONTROL_EMPTY_ERROR)
            return self
        if self.lo is None or self.hi is None:
            raise ValueError(CONTROL_EMPTY_ERROR)
        if self.lo > self.hi:
            raise ValueError(CONTROL_INTERVAL_ERROR.format(self.lo, self.hi))
        return self

    @classmethod
    def interval(
        cls,
        lo: float,
        hi: float,
        samples: int = DEFAULT_CONTROL_SAMPLES,
    ) -> "ControlSet":
        return cls(lo=lo, hi=hi, samples=samples)

    @classmethod
    def finite(cls, points: tuple[float, ...] | list[float]) -> "ControlSet":
        return cls(points=tuple(float(p) for p in points))

    @classmethod
    def singleton(cls, value: float = 0.0) -> "ControlSet":
        """The "no control" case."""
        return cls(points=(float(value),))

    @property
    def is_interval(self) -> bool:
        return self.points is None

    @property
    def midpoint(self) -> float:
        if self.points is not None:
            return float(self.points[len(self.points) // 2])
        assert self.lo is not None and self.hi is not None
        return 0.5 * (self.lo + self.hi)

    def sample(self, samples: int | None = None) -> FloatArray:
        """
        Return the control values the scheme maximizes over.

        Args:
            samples: Override of the interval sample count; ignored for
                explicit point sets

        Returns:
            1-D array of controls in increasing index order
        """
        if self.points is not None:
            return np.array(self.points, dtype=np.float64)
        count = self.samples if samples is None else samples
        if count < 1:
            raise InvalidParameterError(CONTROL_SAMPLES_ERROR.format(count))
        assert self.lo is not None and self.hi is not None
        if count == 1:
            return np.array([self.midpoint])
        return np.linspace(self.lo, self.hi, count)


class ProblemSpec(BaseModel):
    """A one-dimensional G-stochastic optimal control problem.

    ``drift``, ``diffusion`` and ``quad_drift`` are the coefficients of ``ds``,
    ``dB_s`` and ``d<B>_s``; ``running_cost`` is integrated in time and
    ``terminal`` is paid at the horizon.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = "custom"
    horizon: float = Field(gt=0.0)
    state_dim: int = Field(default=1, ge=1)
    drift: Callable[..., Any]
    diffusion: Callable[..., Any]
    quad_drift: Callable[..., Any]
    running_cost: Callable[..., Any]
    terminal: Callable[..., Any]
    controls: ControlSet
    gparams: GParams
    growth_bound: float | None = Field(default=None, gt=0.0)

    def require_scalar_state(self) -> None:
        """Raise for state dimensions the lattice solver does not handle."""
        if self.state_dim != 1:
            raise UnsupportedDimensionError(self.state_dim)

    def with_terminal(self, terminal: Callable[..., Any]) -> "ProblemSpec":
        return self.model_copy(update={"terminal": terminal})

    def terminal_values(self, x: FloatArray) -> FloatArray:
        values = np.broadcast_to(
            np.asarray(self.terminal(x), dtype=np.float64),
            np.shape(x),
        ).copy()
        _check_finite("terminal", values, 1.0 * self.horizon, x, np.zeros_like(x))
        return values


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form value function and, when known, the optimal feedback control."""

    value: Callable[..., Any]
    optimal_control: Callable[..., Any] | None = None


class Coefficients(NamedTuple):
    """Coefficients evaluated on a broadcast (state, control) block."""

    drift: FloatArray
    diffusion: FloatArray
    quad_drift: FloatArray
    running_cost: FloatArray


def _check_finite(
    name: str,
    values: FloatArray,
    t: float,
    x: FloatArray,
    a: FloatArray,
) -> None:
    bad = ~np.isfinite(values)
    if not bad.any():
        return
    index = np.unravel_index(int(np.argmax(bad)), values.shape)
    xb, ab = np.broadcast_arrays(x, a)
    xb = np.broadcast_to(xb, values.shape)
    ab = np.broadcast_to(ab, values.shape)
    raise CoefficientEvaluationError(name, float(t), float(xb[index]), float(ab[index]))


def evaluate_coefficients(
    problem: ProblemSpec,
    t: float,
    x: FloatArray,
    a: FloatArray,
) -> Coefficients:
    """
    Evaluate all coefficients at time ``t`` on the broadcast of ``x`` and ``a``.

    Raises:
        CoefficientEvaluationError: If any value is not finite
    """
    shape = np.broadcast_shapes(np.shape(x), np.shape(a))
    arrays = []
    for name, func in (
        ("drift", problem.drift),
        ("diffusion", problem.diffusion),
        ("quad_drift", problem.quad_drift),
        ("running_cost", problem.running_cost),
    ):
        values = np.broadcast_to(np.asarray(func(t, x, a), dtype=np.float64), shape)
        _check_finite(name, values, t, x, a)
        arrays.append(values)
    return Coefficients(*arrays)


def g_function(gp: GParams, a: ArrayOrScalar) -> Any:
    """``G(a) = (sigma_hi**2 * a+ - sigma_lo**2 * a-) / 2``; works on arrays."""
    return 0.5 * (
        gp.sigma_hi**2 * np.maximum(a, 0.0) - gp.sigma_lo**2 * np.maximum(-a, 0.0)
    )


def hjb_residual(
    problem: ProblemSpec,
    value: Callable[[float, float], float],
    t: float,
    x: float,
    fd_step: float = DEFAULT_FD_STEP,
    control_samples: int = RESIDUAL_CONTROL_SAMPLES,
) -> float:
    """
    Residual of the HJB equation for a candidate value function.

    Derivatives are central differences with step ``fd_step``; the Hamiltonian
    is maximized over ``control_samples`` controls (explicit point sets are used
    as they are).

    Args:
        problem: Control problem
        value: Candidate value function ``(t, x) -> float``
        t: Interior time, ``0 < t < T``
        x: State
        fd_step: Finite-difference step
        control_samples: Interval sample count

    Returns:
        ``v_t + max_a [G(sigma**2 v_xx + 2 h v_x) + b v_x + f]``

    Raises:
        DomainError: If the stencil leaves ``[0, T]`` or the value is not finite
    """
    if problem.state_dim != 1:
        raise UnsupportedDimensionError(problem.state_dim)
    if fd_step <= 0.0:
        raise InvalidParameterError(f"fd_step must be positive, got {fd_step}")
    if not 0.0 < t < problem.horizon:
        raise DomainError(RESIDUAL_TIME_ERROR.format(t))
    if t - fd_step < 0.0 or t + fd_step > problem.horizon:
        raise DomainError(FD_STEP_ERROR.format(t, problem.horizon))

    stencil = {
        "center": value(t, x),
        "t_plus": value(t + fd_step, x),
        "t_minus": value(t - fd_step, x),
        "x_plus": value(t, x + fd_step),
        "x_minus": value(t, x - fd_step),
    }
    if not all(np.isfinite(v) for v in stencil.values()):
        raise DomainError(f"value function is not finite around (t={t}, x={x})")

    v_t = (stencil["t_plus"] - stencil["t_minus"]) / (2.0 * fd_step)
    v_x = (stencil["x_plus"] - stencil["x_minus"]) / (2.0 * fd_step)
    v_xx = (stencil["x_plus"] - 2.0 * stencil["center"] + stencil["x_minus"]) / (
        fd_step * fd_step
    )

    controls = problem.controls.sample(control_samples)
    coeffs = evaluate_coefficients(problem, t, np.array([x]), controls)
    hamiltonian = (
        g_function(
            problem.gparams,
            coeffs.diffusion**2 * v_xx + 2.0 * coeffs.quad_drift * v_x,
        )
        + coeffs.drift * v_x
        + coeffs.running_cost
    )
    return float(v_t + np.max(hamiltonian))


__all__ = [
    "Coefficients",
    "ControlSet",
    "ExactSolution",
    "GParams",
    "ProblemSpec",
    "evaluate_coefficients",
    "g_function",
    "hjb_residual",
]
