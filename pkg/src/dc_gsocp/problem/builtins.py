"""
Built-in problems with closed-form solutions.

``gheat``: a G-heat equation with a piecewise-cosine terminal payoff.
``lq``: a controlled linear system whose volatility is the control.
``sine``: a state-dependent system whose value function is the identity.
"""

from collections.abc import Callable
from math import isclose
from typing import Any

import numpy as np

from ..hookspecs import hookimpl
from ..utils.constants import (
    DEFAULT_CONTROL_SAMPLES,
    DEGENERATE_LQ_ERROR,
    GHEAT_SIGMA_ERROR,
)
from ..utils.definitions import FloatArray
from ..utils.exceptions import DegenerateParameterError, DomainError
from .spec import ControlSet, ExactSolution, GParams, ProblemSpec

HORIZON = 1.0
TWO_PI = 2.0 * np.pi


def _zero(t: float, x: Any, a: Any) -> float:
    return 0.0


def _one(t: float, x: Any, a: Any) -> float:
    return 1.0


def gheat_terminal(beta: float) -> Callable[[Any], Any]:
    """
    Piecewise-cosine payoff of period ``2*pi`` for the volatility ratio ``beta``.

    On ``[-pi/(1+beta), pi/(1+beta))`` it is ``2/(1+beta)*cos((1+beta)x/2)``; on
    ``[pi/(1+beta), (2*beta+1)*pi/(1+beta))`` the wider negative lobe
    ``2*beta/(1+beta)*cos((1+beta)x/(2*beta) + (beta-1)*pi/(2*beta))``.
    """
    edge = np.pi / (1.0 + beta)

    def terminal(x: Any) -> Any:
        y = np.asarray(x, dtype=np.float64)
        y = y - TWO_PI * np.floor((y + edge) / TWO_PI)
        narrow = 2.0 / (1.0 + beta) * np.cos(0.5 * (1.0 + beta) * y)
        phase = (1.0 + beta) * y / (2.0 * beta) + (beta - 1.0) * np.pi / (2.0 * beta)
        wide = 2.0 * beta / (1.0 + beta) * np.cos(phase)
        return np.where(y < edge, narrow, wide)

    return terminal


def builtin_gheat(
    sigma_lo: float = 0.1,
    sigma_hi: float = 1.0,
) -> tuple[ProblemSpec, ExactSolution]:
    """G-heat equation ``v_t + G(v_xx) = 0`` with the piecewise-cosine payoff."""
    gparams = GParams(sigma_lo=sigma_lo, sigma_hi=sigma_hi)
    if sigma_lo <= 0.0:
        raise DomainError(GHEAT_SIGMA_ERROR, {"sigma_lo": sigma_lo})

    beta = sigma_hi / sigma_lo
    rho = 0.5 * (sigma_lo + sigma_hi)
    terminal = gheat_terminal(beta)

    problem = ProblemSpec(
        name="gheat",
        horizon=HORIZON,
        drift=_zero,
        diffusion=_one,
        quad_drift=_zero,
        running_cost=_zero,
        terminal=terminal,
        controls=ControlSet.singleton(0.0),
        gparams=gparams,
        growth_bound=1.0,
    )

    def value(t: Any, x: Any) -> Any:
        return np.exp(-0.5 * rho * rho * (HORIZON - np.asarray(t))) * terminal(x)

    return problem, ExactSolution(value=value)


def builtin_lq(
    kappa: float = 0.5,
    r0: float = 0.03,
    sigma_lo: float = 0.5,
    sigma_hi: float = 1.0,
) -> tuple[ProblemSpec, ExactSolution]:
    """``dX = (kappa X - a) ds + a dB`` with reward ``2 sqrt(a) exp(-r0 s)``.

    The payoff is ``X_T``; ``kappa = 2 r0`` is rejected.
    """
    if isclose(kappa, 2.0 * r0, rel_tol=0.0, abs_tol=1e-12):
        raise DegenerateParameterError(
            DEGENERATE_LQ_ERROR.format(kappa, 2.0 * r0),
            {"kappa": kappa, "r0": r0},
        )
    gparams = GParams(sigma_lo=sigma_lo, sigma_hi=sigma_hi)
    rate = kappa - 2.0 * r0

    def drift(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        return kappa * x - a

    def diffusion(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        return a + 0.0 * x

    def running_cost(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        return 2.0 * np.sqrt(a) * np.exp(-r0 * t) + 0.0 * x

    problem = ProblemSpec(
        name="lq",
        horizon=HORIZON,
        drift=drift,
        diffusion=diffusion,
        quad_drift=_zero,
        running_cost=running_cost,
        terminal=lambda x: np.asarray(x, dtype=np.float64),
        controls=ControlSet.interval(0.2, 1.0, DEFAULT_CONTROL_SAMPLES),
        gparams=gparams,
        growth_bound=max(1.0, abs(kappa)),
    )

    def value(t: Any, x: Any) -> Any:
        t = np.asarray(t, dtype=np.float64)
        return np.exp(kappa * (HORIZON - t)) * x + np.exp(-kappa * HORIZON) / rate * (
            np.exp(rate * HORIZON) - np.exp(rate * t)
        )

    def optimal_control(t: Any, x: Any) -> Any:
        t = np.asarray(t, dtype=np.float64)
        control = np.exp(2.0 * t * (kappa - r0) - 2.0 * kappa * HORIZON)
        return control + 0.0 * np.asarray(x)

    return problem, ExactSolution(value=value, optimal_control=optimal_control)


def builtin_sine(
    sigma_lo: float = 0.5,
    sigma_hi: float = 1.0,
) -> tuple[ProblemSpec, ExactSolution]:
    """State-dependent volatility ``sin(t+x)**2``; the value function is ``x``."""
    gparams = GParams(sigma_lo=sigma_lo, sigma_hi=sigma_hi)

    def drift(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        return 2.0 * a * np.sin(t + x) ** 2 - 1.0

    def diffusion(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        return np.sin(t + x) ** 2 + 0.0 * a

    def running_cost(t: float, x: FloatArray, a: FloatArray) -> FloatArray:
        c = np.cos(t + x) ** 2
        return 2.0 * c - c * c - a * a

    problem = ProblemSpec(
        name="sine",
        horizon=HORIZON,
        drift=drift,
        diffusion=diffusion,
        quad_drift=_zero,
        running_cost=running_cost,
        terminal=lambda x: np.asarray(x, dtype=np.float64),
        controls=ControlSet.interval(0.0, 1.0, DEFAULT_CONTROL_SAMPLES),
        gparams=gparams,
        growth_bound=1.0,
    )

    def value(t: Any, x: Any) -> Any:
        return np.asarray(x, dtype=np.float64) + 0.0 * np.asarray(t)

    def optimal_control(t: Any, x: Any) -> Any:
        return np.sin(np.asarray(t) + np.asarray(x)) ** 2

    return problem, ExactSolution(value=value, optimal_control=optimal_control)


@hookimpl
def register_problems(registry: Any) -> None:
    """Register the built-in problems."""
    from .registry import ProblemEntry

    registry.add(
        ProblemEntry(
            name="gheat",
            factory=builtin_gheat,
            defaults={"sigma_lo": 0.1, "sigma_hi": 1.0},
            description="G-heat equation with piecewise-cosine payoff",
        ),
    )
    registry.add(
        ProblemEntry(
            name="lq",
            factory=builtin_lq,
            defaults={"kappa": 0.5, "r0": 0.03, "sigma_lo": 0.5, "sigma_hi": 1.0},
            description="Linear system with volatility control",
        ),
    )
    registry.add(
        ProblemEntry(
            name="sine",
            factory=builtin_sine,
            defaults={"sigma_lo": 0.5, "sigma_hi": 1.0},
            description="State-dependent sine system with value v(t, x) = x",
        ),
    )
