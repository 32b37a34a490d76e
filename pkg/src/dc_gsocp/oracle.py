"""
Independent checks for the lattice solver.

``tree_value`` evaluates the discrete recursion on the full branching tree with
no spatial interpolation. ``mc_lower_bound`` simulates the Euler scheme for one
fixed volatility and feedback policy, which is a member of the supremum and so
bounds the value from below. ``fit_rate`` turns an error sequence into an
observed convergence order.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .lattice import LatticeFamily
from .problem.spec import ProblemSpec, evaluate_coefficients
from .solver import successor_block
from .utils.constants import (
    DEFAULT_MC_CHUNK,
    DEFAULT_MC_PATHS,
    DEFAULT_SEED,
    MAX_TREE_LEAVES,
    MAX_TREE_STEPS,
    MC_PATHS_ERROR,
    MIN_MC_PATHS,
    RATE_POINTS_ERROR,
    STEPS_ERROR,
    THETA_RANGE_ERROR,
)
from .utils.definitions import FloatArray, Policy
from .utils.exceptions import (
    BudgetExceededError,
    DomainError,
    InvalidParameterError,
    LogDomainError,
)
from .utils.logging import StageTimer, get_logger

logger = get_logger(__name__)

U64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of the simulated payoff and its standard error."""

    mean: float
    stderr: float
    n_paths: int
    seed: int

    def lower_bound_holds(self, value: float, allowance: float = 0.0) -> bool:
        """Whether ``mean - 3*stderr <= value + allowance``."""
        return self.mean - 3.0 * self.stderr <= value + allowance


def tree_value(
    problem: ProblemSpec,
    x0: float,
    n_steps: int,
    family: LatticeFamily,
    control_samples: int | None = None,
) -> float:
    """
    Evaluate the discrete recursion exactly on the branching tree.

    Every (control, member, point) branch is expanded level by level; the
    reduction then walks back with the same weighted sums and maxima as the
    solver, in fixed branch order.

    Raises:
        BudgetExceededError: If ``n_steps > 8`` or the tree is too large
    """
    if n_steps < 1:
        raise InvalidParameterError(STEPS_ERROR.format(n_steps))
    problem.require_scalar_state()
    controls = problem.controls.sample(control_samples)
    n_members, n_points = family.points_matrix.shape
    branching = controls.size * n_members * n_points
    leaves = branching**n_steps
    if n_steps > MAX_TREE_STEPS or leaves > MAX_TREE_LEAVES:
        raise BudgetExceededError(n_steps, leaves, MAX_TREE_STEPS, MAX_TREE_LEAVES)

    delta = problem.horizon / n_steps
    states = [np.array([float(x0)])]
    rewards = []
    for k in range(n_steps):
        coeffs, targets = successor_block(
            problem,
            k * delta,
            states[-1],
            controls,
            family,
            delta,
        )
        rewards.append(coeffs.running_cost * delta)
        states.append(targets.reshape(-1))

    values = problem.terminal_values(states[-1])
    for k in range(n_steps - 1, -1, -1):
        count = states[k].size
        continuation = values.reshape(count, controls.size, n_members, n_points)
        expected = np.einsum("jmkl,kl->jmk", continuation, family.probs_matrix)
        expected += rewards[k][:, :, None]
        values = expected.reshape(count, controls.size * n_members).max(axis=1)
    return float(values[0])


def _constant_policy(value: float) -> Policy:
    def policy(t: float, x: FloatArray) -> float:
        return value

    return policy


def _path_normals(seed: int, paths: range, n_steps: int) -> FloatArray:
    """Standard normals for a block of paths; path ``p`` owns stream ``(seed, p)``."""
    rows = []
    for p in paths:
        bit_generator = np.random.Philox(key=(seed & U64_MASK) | (p << 64))
        rows.append(np.random.Generator(bit_generator).standard_normal(n_steps))
    return np.stack(rows)


def mc_lower_bound(
    problem: ProblemSpec,
    x0: float,
    n_steps: int,
    theta: float,
    policy: Policy | None = None,
    n_paths: int = DEFAULT_MC_PATHS,
    seed: int = DEFAULT_SEED,
    *,
    chunk: int = DEFAULT_MC_CHUNK,
) -> McEstimate:
    """
    Monte Carlo estimate of the payoff of one admissible strategy.

    Paths follow the Euler scheme with ``dB = theta*sqrt(delta)*Z`` and
    ``d<B> = theta**2*delta``. The normals of path ``p`` come from a Philox
    stream keyed by ``(seed, p)`` and step ``i`` takes the ``i``-th draw, so the
    estimate does not depend on chunking.

    Args:
        problem: Control problem
        x0: Initial state
        n_steps: Number of Euler steps
        theta: Constant volatility in ``[sigma_lo, sigma_hi]``
        policy: Feedback ``(t, x) -> a``; defaults to the control-set midpoint
        n_paths: Number of paths, at least 100
        seed: Unsigned 64-bit seed
        chunk: Paths simulated together

    Returns:
        McEstimate with the sample mean and its standard error

    Raises:
        DomainError: If theta lies outside the volatility bounds
    """
    gp = problem.gparams
    if not gp.sigma_lo <= theta <= gp.sigma_hi:
        raise DomainError(
            THETA_RANGE_ERROR.format(theta, gp.sigma_lo, gp.sigma_hi),
            {"theta": theta},
        )
    if n_paths < MIN_MC_PATHS:
        raise InvalidParameterError(MC_PATHS_ERROR.format(MIN_MC_PATHS, n_paths))
    if n_steps < 1:
        raise InvalidParameterError(STEPS_ERROR.format(n_steps))
    problem.require_scalar_state()

    feedback = policy or _constant_policy(problem.controls.midpoint)
    delta = problem.horizon / n_steps
    dbracket = theta * theta * delta
    scale = theta * sqrt(delta)
    payoffs = np.empty(n_paths)

    with StageTimer("mc", problem=problem.name, paths=n_paths, n_steps=n_steps):
        for start in range(0, n_paths, chunk):
            stop = min(start + chunk, n_paths)
            normals = _path_normals(seed, range(start, stop), n_steps)
            state = np.full(stop - start, float(x0))
            reward = np.zeros(stop - start)
            for i in range(n_steps):
                t = i * delta
                action = np.broadcast_to(
                    np.asarray(feedback(t, state), dtype=np.float64),
                    state.shape,
                )
                coeffs = evaluate_coefficients(problem, t, state, action)
                reward += coeffs.running_cost * delta
                state = (
                    state
                    + coeffs.drift * delta
                    + coeffs.diffusion * scale * normals[:, i]
                    + coeffs.quad_drift * dbracket
                )
            payoffs[start:stop] = problem.terminal_values(state) + reward

    mean = float(np.mean(payoffs))
    stderr = float(np.std(payoffs, ddof=1) / sqrt(n_paths))
    logger.debug(
        "mc estimate",
        problem=problem.name,
        theta=theta,
        mean=mean,
        stderr=stderr,
    )
    return McEstimate(mean=mean, stderr=stderr, n_paths=n_paths, seed=seed)


def _log_pairs(
    deltas: Sequence[float],
    errors: Sequence[float],
) -> tuple[FloatArray, FloatArray]:
    d = np.asarray(deltas, dtype=np.float64)
    e = np.asarray(errors, dtype=np.float64)
    if d.shape != e.shape or d.ndim != 1:
        raise InvalidParameterError("deltas and errors must be matching sequences")
    if d.size < 2:
        raise InvalidParameterError(RATE_POINTS_ERROR.format(d.size))
    if np.any(e <= 0.0) or np.any(d <= 0.0):
        raise LogDomainError(list(e))
    return np.log(d), np.log(e)


def fit_rate(deltas: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(delta)``."""
    log_d, log_e = _log_pairs(deltas, errors)
    slope, _ = np.polyfit(log_d, log_e, 1)
    return float(slope)


def successive_rates(deltas: Sequence[float], errors: Sequence[float]) -> list[float]:
    """Observed order between consecutive refinements."""
    log_d, log_e = _log_pairs(deltas, errors)
    return [float(r) for r in np.diff(log_e) / np.diff(log_d)]
