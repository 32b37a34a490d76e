"""
Tests for grids, value fields, interpolation and reachable domains.
"""

import io

import numpy as np
import pytest

from dc_gsocp.grid import (
    ClampCounter,
    Grid1D,
    ValueField,
    interpolate,
    reachable_domain,
    reachable_domains,
    write_field_csv,
)
from dc_gsocp.lattice import make_family
from dc_gsocp.solver import resolve_spacing, successor_block
from dc_gsocp.utils.definitions import InterpMethod, SchemeKind
from dc_gsocp.utils.exceptions import DomainGrowthError, InvalidParameterError
from dc_gsocp.utils.formatting import read_rows
from tests.factories import create_field, create_problem, create_solver_config

pytestmark = pytest.mark.unit


class TestGrid1D:
    def test_aligned_covers_interval(self) -> None:
        grid = Grid1D.aligned(-0.3, 0.7, 0.0, 0.25)

        assert grid.lo == pytest.approx(-0.5)
        assert grid.hi == pytest.approx(0.75)
        assert grid.n_nodes == 6
        assert grid.spacing == pytest.approx(0.25)

    def test_aligned_snaps_endpoints_on_nodes(self) -> None:
        grid = Grid1D.aligned(0.0, 1.0, 0.0, 0.25)
        assert grid.n_nodes == 5
        np.testing.assert_allclose(grid.nodes, [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_aligned_point_gets_two_nodes(self) -> None:
        grid = Grid1D.aligned(0.0, 0.0, 0.0, 0.1)
        assert grid.n_nodes == 2
        assert grid.lo == 0.0

    def test_nodes_end_on_hi_and_are_read_only(self) -> None:
        grid = Grid1D(-1.0, 2.0, 7)
        assert grid.nodes[-1] == 2.0
        with pytest.raises(ValueError):
            grid.nodes[0] = 5.0

    def test_nearest_index(self) -> None:
        grid = Grid1D(0.0, 1.0, 11)
        assert grid.nearest_index(0.33) == 3
        assert grid.nearest_index(-4.0) == 0
        assert grid.nearest_index(4.0) == 10

    @pytest.mark.parametrize(("lo", "hi", "n"), [(1.0, 0.0, 5), (0.0, 1.0, 1)])
    def test_invalid(self, lo: float, hi: float, n: int) -> None:
        with pytest.raises(InvalidParameterError):
            Grid1D(lo, hi, n)

    def test_invalid_spacing(self) -> None:
        with pytest.raises(InvalidParameterError):
            Grid1D.aligned(0.0, 1.0, 0.0, 0.0)


class TestValueField:
    def test_shape_checked(self) -> None:
        with pytest.raises(InvalidParameterError):
            ValueField(grid=Grid1D(0.0, 1.0, 3), values=np.zeros(4), time_index=0)

    def test_finite_values_required(self) -> None:
        with pytest.raises(InvalidParameterError):
            ValueField(
                grid=Grid1D(0.0, 1.0, 3),
                values=np.array([0.0, np.nan, 1.0]),
                time_index=0,
            )

    def test_policy_shape_checked(self) -> None:
        with pytest.raises(InvalidParameterError):
            ValueField(
                grid=Grid1D(0.0, 1.0, 3),
                values=np.zeros(3),
                time_index=0,
                policy=np.zeros((3, 3), dtype=np.int64),
            )


class TestInterpolate:
    def test_linear_reproduces_linear_functions(self) -> None:
        field = create_field(values=2.0 * np.linspace(0.0, 1.0, 11) + 1.0)

        assert interpolate(field, 0.37) == pytest.approx(1.74, abs=1e-12)
        assert isinstance(interpolate(field, 0.37), float)

    def test_linear_between_nodes(self) -> None:
        field = create_field()
        assert interpolate(field, 0.05) == pytest.approx(0.005, abs=1e-15)
        assert interpolate(field, 0.3) == pytest.approx(0.09, abs=1e-15)

    def test_array_shape_preserved(self) -> None:
        field = create_field()
        result = interpolate(field, np.full((2, 3), 0.5))
        assert result.shape == (2, 3)
        np.testing.assert_allclose(result, 0.25)

    def test_clamping_counted(self) -> None:
        field = create_field()
        counter = ClampCounter()

        result = interpolate(field, np.array([-0.5, 0.5, 1.5]), counter=counter)

        np.testing.assert_allclose(result, [0.0, 0.25, 1.0])
        assert counter.value == 2

    def test_rounding_slack_not_counted(self) -> None:
        field = create_field()
        counter = ClampCounter()
        interpolate(field, np.array([1.0 + 1e-12, -1e-12]), counter=counter)
        assert counter.value == 0

    @pytest.mark.parametrize("method", list(InterpMethod))
    def test_exact_at_nodes(self, method: InterpMethod) -> None:
        field = create_field()
        np.testing.assert_allclose(
            interpolate(field, field.grid.nodes, method),
            field.values,
            atol=1e-14,
        )

    def test_cubic_is_monotone(self) -> None:
        values = np.array([0.0, 0.0, 0.1, 0.9, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
        field = create_field(values=values)
        x = np.linspace(0.0, 1.0, 501)

        result = interpolate(field, x, InterpMethod.CUBIC_MONOTONE)

        assert np.all(np.diff(result) >= -1e-14)
        assert result.min() >= -1e-14
        assert result.max() <= 1.0 + 1e-14

    def test_cubic_clamps(self) -> None:
        field = create_field()
        counter = ClampCounter()
        query = np.array([2.0])
        result = interpolate(field, query, InterpMethod.CUBIC_MONOTONE, counter)
        assert result[0] == pytest.approx(1.0)
        assert counter.value == 1

    def test_spline_reproduces_linear_functions(self) -> None:
        field = create_field(values=2.0 * np.linspace(0.0, 1.0, 11) + 1.0)
        x = np.linspace(0.0, 1.0, 37)

        result = interpolate(field, x, InterpMethod.CUBIC_SPLINE)

        np.testing.assert_allclose(result, 2.0 * x + 1.0, atol=1e-13)

    def test_spline_clamps(self) -> None:
        field = create_field()
        counter = ClampCounter()
        query = np.array([-1.0, 0.5, 3.0])

        result = interpolate(field, query, InterpMethod.CUBIC_SPLINE, counter)

        assert result[0] == pytest.approx(0.0, abs=1e-14)
        assert result[2] == pytest.approx(1.0, abs=1e-14)
        assert counter.value == 2


class TestReachableDomains:
    def test_heat_problem_grows_by_sqrt_delta(self) -> None:
        problem = create_problem()
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)

        domains = reachable_domains(problem, 0.0, 4, family, 0.25)

        expected = [(-0.5 * k, 0.5 * k) for k in range(5)]
        np.testing.assert_allclose(domains, expected, atol=1e-14)
        assert reachable_domain(problem, 0.0, 4, family, 0.25) == domains[-1]

    def test_truncation(self) -> None:
        problem = create_problem()
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)

        domains = reachable_domains(
            problem,
            1.0,
            4,
            family,
            0.25,
            truncation_radius=0.75,
        )

        assert domains[-1] == pytest.approx((0.25, 1.75))
        assert domains[1] == pytest.approx((0.5, 1.5))

    def test_spacing_covers_each_level(self) -> None:
        problem = create_problem()
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)

        domains = reachable_domains(problem, 0.0, 3, family, 0.25, spacing=0.25)

        for (lo, hi), (next_lo, next_hi) in zip(domains, domains[1:], strict=False):
            assert next_lo <= lo - 0.5 + 1e-12
            assert next_hi >= hi + 0.5 - 1e-12

    def test_divergent_coefficient(self) -> None:
        problem = create_problem(
            drift=lambda t, x, a: np.where(np.abs(x) > 0.6, np.inf, 0.0),
        )
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)

        with pytest.raises(DomainGrowthError) as exc_info:
            reachable_domains(problem, 0.0, 4, family, 0.25)
        assert exc_info.value.details["level"] == 3

    def test_growth_bound_warning(self, captured_logs) -> None:
        problem = create_problem(
            diffusion=lambda t, x, a: 10.0 + 0.0 * x,
            growth_bound=1.0,
        )
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)

        reachable_domains(problem, 0.0, 1, family, 0.25)

        assert "coefficient exceeds declared growth bound" in captured_logs.text

    @pytest.mark.parametrize("n_steps", [1, 2, 3, 4])
    @pytest.mark.parametrize("scheme", list(SchemeKind))
    def test_encloses_solver_successors(self, sine, scheme, n_steps) -> None:
        problem, _ = sine
        cfg = create_solver_config(n_steps=n_steps, scheme=scheme, control_samples=9)
        family = cfg.family(problem.gparams)
        delta = cfg.delta(problem.horizon)
        spacing = resolve_spacing(cfg, delta)
        controls = problem.controls.sample(9)

        domains = reachable_domains(
            problem,
            0.0,
            n_steps,
            family,
            delta,
            controls=controls,
            spacing=spacing,
        )

        for k in range(n_steps):
            (lo, hi), (next_lo, next_hi) = domains[k], domains[k + 1]
            nodes = Grid1D.aligned(lo, hi, 0.0, spacing).nodes
            _, targets = successor_block(
                problem, k * delta, nodes, controls, family, delta
            )
            assert targets.min() >= next_lo - 1e-12
            assert targets.max() <= next_hi + 1e-12

    @pytest.mark.parametrize("n_steps", [1, 2, 3, 4])
    def test_encloses_every_path_from_start(self, sine, n_steps) -> None:
        problem, _ = sine
        family = make_family(SchemeKind.TRINOMIAL, 0.5, 1.0)
        controls = problem.controls.sample(5)
        delta = problem.horizon / n_steps

        domains = reachable_domains(
            problem,
            0.0,
            n_steps,
            family,
            delta,
            controls=controls,
        )

        states = np.array([0.0])
        for k in range(n_steps):
            _, targets = successor_block(
                problem, k * delta, states, controls, family, delta
            )
            states = np.unique(targets)
            lo, hi = domains[k + 1]
            assert states.min() >= lo - 1e-12
            assert states.max() <= hi + 1e-12


class TestFieldCsv:
    def test_without_policy(self) -> None:
        field = create_field(n_nodes=3)
        buffer = io.StringIO()

        write_field_csv(field, buffer, [0.0], [1.0])

        header, rows = read_rows(buffer.getvalue())
        assert header == ["x", "value", "argmax_control", "argmax_sigma"]
        assert len(rows) == 3
        assert rows[1][:2] == ["5.00000000e-01", "2.50000000e-01"]
        assert rows[1][2] == "nan"

    def test_with_policy_to_path(self, temp_dir) -> None:
        grid = Grid1D(0.0, 1.0, 2)
        field = ValueField(
            grid=grid,
            values=np.array([1.0, 2.0]),
            time_index=0,
            policy=np.array([[0, 1], [1, 0]]),
        )
        target = temp_dir / "field.csv"

        field.to_csv(target, [0.2, 0.4], [0.1, 1.0])

        _, rows = read_rows(target.read_text(encoding="utf-8"))
        assert [float(v) for v in rows[0]] == [0.0, 1.0, 0.2, 1.0]
        assert [float(v) for v in rows[1]] == [1.0, 2.0, 0.4, 0.1]
