"""
Tests for the backward solver.
"""

from math import sqrt

import numpy as np
import pytest
from pydantic import ValidationError

from dc_gsocp.problem import GParams
from dc_gsocp.solver import (
    SolverConfig,
    backward_step,
    extract_policy,
    resolve_spacing,
    solve,
    successor,
    successor_block,
)
from dc_gsocp.utils.definitions import GridScale, SchemeKind
from dc_gsocp.utils.exceptions import (
    DomainViolationError,
    InvalidParameterError,
    InvalidVolatilityError,
    PolicyNotRecordedError,
)
from tests.constants import GHEAT_EXACT_VALUE
from tests.factories import (
    create_controlled_problem,
    create_problem,
    create_solver_config,
    create_square_problem,
)

pytestmark = pytest.mark.unit


class TestSolverConfig:
    def test_defaults(self) -> None:
        cfg = SolverConfig(n_steps=16)

        assert cfg.scheme is SchemeKind.TRINOMIAL
        assert cfg.gh_order == 6
        assert cfg.delta(1.0) == pytest.approx(1.0 / 16)
        assert cfg.workers == 1

    def test_invalid_steps(self) -> None:
        with pytest.raises(ValidationError):
            SolverConfig(n_steps=0)

    def test_family_checks_trinomial_bound(self) -> None:
        cfg = SolverConfig(n_steps=4)
        with pytest.raises(InvalidVolatilityError):
            cfg.family(GParams(sigma_lo=0.5, sigma_hi=1.5))


class TestResolveSpacing:
    @pytest.mark.parametrize(
        ("delta", "factor", "expected"),
        [
            (1.0 / 16, 1.0, 1.0 / 16),
            (0.01, 1.0, 0.01),
            (1.0 / 16, 0.05, 1.0 / 320),
            (1.0 / 3, 1.0, sqrt(1.0 / 3) / 2),
            (1.0, 1.0, 1.0),
        ],
    )
    def test_snapped_to_root_fraction(
        self,
        delta: float,
        factor: float,
        expected: float,
    ) -> None:
        cfg = create_solver_config(grid_factor=factor)
        assert resolve_spacing(cfg, delta) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize(
        ("delta", "factor", "expected"),
        [
            (1.0 / 16, 1.0, 0.25),
            (1.0 / 64, 1.0, 0.125),
            (1.0 / 16, 0.5, 0.125),
            (1.0 / 16, 0.4, 0.25 / 3),
            (1.0 / 16, 2.0, 0.25),
        ],
    )
    def test_sqrt_delta_scale(
        self,
        delta: float,
        factor: float,
        expected: float,
    ) -> None:
        cfg = create_solver_config(grid_factor=factor, grid_scale=GridScale.SQRT_DELTA)
        assert resolve_spacing(cfg, delta) == pytest.approx(expected, rel=1e-12)

    def test_explicit_spacing_wins(self) -> None:
        cfg = create_solver_config(grid_spacing=0.123)
        assert resolve_spacing(cfg, 0.25) == 0.123
        scaled = create_solver_config(grid_spacing=0.2, grid_scale="sqrt_delta")
        assert resolve_spacing(scaled, 0.25) == 0.2


class TestSuccessor:
    def test_drift_noise_and_quadratic_term(self) -> None:
        problem = create_problem(
            drift=lambda t, x, a: a + 0.0 * x,
            quad_drift=lambda t, x, a: 2.0 + 0.0 * x,
        )
        assert successor(1.0, 0.0, 0.5, 1.0, 0.25, problem) == pytest.approx(2.125)
        assert successor(1.0, 0.0, 0.5, -1.0, 0.25, problem) == pytest.approx(1.125)

    def test_nonpositive_delta(self) -> None:
        with pytest.raises(InvalidParameterError):
            successor(0.0, 0.0, 0.0, 1.0, 0.0, create_problem())

    def test_block_shape(self) -> None:
        problem = create_controlled_problem(samples=2)
        cfg = create_solver_config()
        family = cfg.family(problem.gparams)

        coeffs, targets = successor_block(
            problem,
            0.0,
            np.array([0.0, 1.0, 2.0]),
            problem.controls.sample(),
            family,
            0.25,
        )

        assert targets.shape == (3, 2, 2, 3)
        assert coeffs.drift.shape == (3, 2)
        assert targets[1, 1, 0, 2] == pytest.approx(1.0 + 0.25 + 0.5)


class TestSolve:
    def test_martingale_payoff(self) -> None:
        result = solve(create_problem(), 0.3, create_solver_config())

        assert result.value_at_start == pytest.approx(0.3, abs=1e-12)
        assert result.clamp_count == 0
        assert result.n_steps == 8
        assert [f.time_index for f in result.fields] == list(range(9))

    def test_convex_payoff_uses_upper_volatility(self) -> None:
        result = solve(create_square_problem(), 0.0, create_solver_config())

        assert result.value_at_start == pytest.approx(1.0, abs=1e-10)
        assert extract_policy(result, 0.0, 0.0) == (0.0, 1.0)

    def test_concave_payoff_uses_lower_volatility(self) -> None:
        problem = create_square_problem()
        problem = problem.with_terminal(lambda x: -(np.asarray(x) ** 2))

        result = solve(problem, 0.0, create_solver_config())

        assert result.value_at_start == pytest.approx(-0.25, abs=1e-10)
        assert extract_policy(result, 0.5, 0.0)[1] == 0.5

    def test_best_control_selected(self) -> None:
        result = solve(create_controlled_problem(), 0.0, create_solver_config())

        assert result.value_at_start == pytest.approx(1.0, abs=1e-10)
        assert extract_policy(result, 0.0, 0.0)[0] == 1.0
        policy = result.feedback_policy()
        np.testing.assert_array_equal(policy(0.5, np.array([0.0, 0.25])), [1.0, 1.0])

    def test_gheat_first_table_entry(self, gheat) -> None:
        problem, _ = gheat
        result = solve(problem, 0.0, SolverConfig(n_steps=16))

        assert abs(result.value_at_start - GHEAT_EXACT_VALUE) <= 4e-3
        assert result.clamp_count == 0
        np.testing.assert_allclose(result.sigma_levels, [0.1, 1.0])

    def test_policy_not_recorded(self) -> None:
        result = solve(create_problem(), 0.0, create_solver_config(record_policy=False))

        with pytest.raises(PolicyNotRecordedError):
            extract_policy(result, 0.0, 0.0)
        with pytest.raises(PolicyNotRecordedError):
            result.feedback_policy()

    def test_deterministic(self, gheat) -> None:
        problem, _ = gheat
        cfg = SolverConfig(n_steps=16)

        first = solve(problem, 0.0, cfg)
        second = solve(problem, 0.0, cfg)

        assert first.value_at_start == second.value_at_start
        np.testing.assert_array_equal(first.fields[0].values, second.fields[0].values)

    def test_worker_count_does_not_change_results(self, lq) -> None:
        problem, _ = lq
        base = {"n_steps": 8, "control_samples": 9, "chunk_elements": 64}

        serial = solve(problem, 0.0, SolverConfig(**base, workers=1))
        threaded = solve(problem, 0.0, SolverConfig(**base, workers=4))

        assert serial.value_at_start == threaded.value_at_start
        for a, b in zip(serial.fields[:-1], threaded.fields[:-1], strict=True):
            np.testing.assert_array_equal(a.values, b.values)
            np.testing.assert_array_equal(a.policy, b.policy)

    def test_chunking_does_not_change_results(self, lq) -> None:
        problem, _ = lq
        small = SolverConfig(n_steps=8, control_samples=9, chunk_elements=64)
        large = SolverConfig(n_steps=8, control_samples=9)

        a = solve(problem, 0.0, small)
        b = solve(problem, 0.0, large)

        assert a.value_at_start == pytest.approx(b.value_at_start, abs=1e-13)


class TestExtractPolicy:
    def test_lq_control_at_start(self, lq) -> None:
        problem, exact = lq
        n_steps, samples = 32, 201
        delta = problem.horizon / n_steps
        spacing = (problem.controls.hi - problem.controls.lo) / (samples - 1)
        result = solve(
            problem,
            0.0,
            SolverConfig(n_steps=n_steps, control_samples=samples),
        )

        control, _ = extract_policy(result, 0.0, 0.0)

        # Linear value: the step maximiser is (1 + kappa * delta) ** (2 - 2N).
        step_optimum = (1.0 + 0.5 * delta) ** (2 - 2 * n_steps)
        assert abs(control - step_optimum) <= spacing + 1e-12
        target = float(exact.optimal_control(0.0, 0.0))
        assert target == pytest.approx(np.exp(-1.0))
        assert abs(control - target) <= spacing + delta

    def test_lq_feedback_policy_matches_extract(self, lq) -> None:
        problem, _ = lq
        result = solve(problem, 0.0, SolverConfig(n_steps=16, control_samples=41))

        control, _ = extract_policy(result, 0.0, 0.0)
        feedback = result.feedback_policy()(0.0, np.array([0.0]))

        assert feedback[0] == control

    def test_sine_control_vanishes_at_origin(self, sine) -> None:
        problem, exact = sine
        result = solve(
            problem,
            0.0,
            SolverConfig(n_steps=16, scheme=SchemeKind.GAUSS_HERMITE),
        )

        control, _ = extract_policy(result, 0.0, 0.0)

        assert float(exact.optimal_control(0.0, 0.0)) == 0.0
        assert control == 0.0


class TestDomain:
    def test_truncation_clamps(self) -> None:
        cfg = create_solver_config(truncation_radius=0.3)
        result = solve(create_square_problem(), 0.0, cfg)
        assert result.clamp_count > 0

    def test_strict_domain_raises(self) -> None:
        cfg = create_solver_config(truncation_radius=0.3, strict_domain=True)
        with pytest.raises(DomainViolationError) as exc_info:
            solve(create_square_problem(), 0.0, cfg)
        assert exc_info.value.details["count"] > 0


class TestBackwardStep:
    def test_level_mismatch(self) -> None:
        problem = create_problem()
        cfg = create_solver_config()
        family = cfg.family(problem.gparams)
        result = solve(problem, 0.0, cfg)

        with pytest.raises(InvalidParameterError):
            backward_step(result.fields[5], 2, problem, family, cfg)

    def test_reproduces_solver_level(self) -> None:
        problem = create_square_problem()
        cfg = create_solver_config()
        result = solve(problem, 0.0, cfg)

        field = backward_step(
            result.fields[4],
            3,
            problem,
            cfg.family(problem.gparams),
            cfg,
            grid=result.fields[3].grid,
        )

        np.testing.assert_array_equal(field.values, result.fields[3].values)
