"""
Tests for the experiment runners and their CSV reports.
"""

import math

import pytest

from dc_gsocp.problem.registry import ProblemEntry, get_registry
from dc_gsocp.runner import (
    ConvergenceReport,
    ConvergenceRow,
    OracleReport,
    OracleRow,
    residual_to_csv,
    run,
    run_converge,
    run_oracle,
    run_residual,
    run_solve,
)
from dc_gsocp.utils.exceptions import (
    ConfigurationError,
    InvalidParameterError,
    InvalidVolatilityError,
)
from tests.constants import RESIDUAL_BOUND, TEST_PATHS, TEST_SEED
from tests.factories import create_exact_free_entry_factory, create_run_config

pytestmark = pytest.mark.unit

CONVERGENCE_HEADER_LINE = "N,delta,value,exact,abs_error,wall_time_ms"


@pytest.fixture
def nosol(fresh_registry) -> str:
    """Register a martingale problem that has no closed-form solution."""
    entry = ProblemEntry(name="nosol", factory=create_exact_free_entry_factory())
    get_registry().add(entry)
    return entry.name


def make_report(rate: float = 0.5) -> ConvergenceReport:
    rows = tuple(
        ConvergenceRow(
            n_steps=n,
            delta=1.0 / n,
            value=0.15,
            exact=0.16,
            abs_error=0.01,
            wall_time_ms=0.0,
        )
        for n in (4, 8)
    )
    return ConvergenceReport(rows=rows, rate=rate)


class TestConvergenceReport:
    def test_to_csv(self) -> None:
        text = make_report().to_csv()
        lines = text.splitlines()

        assert lines[0] == CONVERGENCE_HEADER_LINE
        assert lines[1].startswith("4,2.50000000e-01,")
        assert lines[-1] == "CR,5.00000000e-01"
        assert text.endswith("\n")

    def test_nan_rate(self) -> None:
        text = make_report(rate=float("nan")).to_csv()

        assert text.splitlines()[-1] == "CR,nan"
        assert math.isnan(ConvergenceReport.from_csv(text).rate)

    def test_from_csv(self) -> None:
        report = make_report()
        parsed = ConvergenceReport.from_csv(report.to_csv())

        assert parsed == report

    def test_bad_header(self) -> None:
        text = make_report().to_csv().replace("abs_error", "error")
        with pytest.raises(InvalidParameterError, match="header"):
            ConvergenceReport.from_csv(text)

    def test_missing_rate_line(self) -> None:
        text = make_report().to_csv().rsplit("CR,", 1)[0]
        with pytest.raises(InvalidParameterError, match="rate"):
            ConvergenceReport.from_csv(text)

    def test_malformed_row(self) -> None:
        text = make_report().to_csv().replace("4,2.5", "four,2.5")
        with pytest.raises(InvalidParameterError):
            ConvergenceReport.from_csv(text)

    def test_empty_document(self) -> None:
        with pytest.raises(InvalidParameterError):
            ConvergenceReport.from_csv("")


class TestRunConverge:
    def test_gheat_converges(self) -> None:
        report = run_converge(create_run_config())

        assert [row.n_steps for row in report.rows] == [4, 8, 16]
        assert report.errors[-1] < 4e-3
        assert report.errors[-1] < report.errors[0]
        assert report.rate > 0.0
        assert all(row.wall_time_ms == 0.0 for row in report.rows)

    def test_byte_identical_reruns(self) -> None:
        cfg = create_run_config(n_list=[4, 8])

        first = run_converge(cfg).to_csv()
        second = run_converge(cfg).to_csv()

        assert first == second
        assert ConvergenceReport.from_csv(first).to_csv() == first

    def test_single_step_count(self) -> None:
        report = run_converge(create_run_config(n_list=[8]))

        assert len(report.rows) == 1
        assert math.isnan(report.rate)

    def test_requires_exact_solution(self, nosol) -> None:
        with pytest.raises(ConfigurationError, match="closed-form"):
            run_converge(create_run_config(problem=nosol))

    def test_trinomial_volatility_checked(self) -> None:
        cfg = create_run_config(problem="lq", sigma_hi=1.5)
        with pytest.raises(InvalidVolatilityError):
            run_converge(cfg)


class TestRunSolve:
    def test_summaries(self) -> None:
        report = run_solve(create_run_config(mode="solve", n_list=[4, 8]))

        assert [s.n_steps for s in report.summaries] == [4, 8]
        lines = report.to_csv().splitlines()
        assert lines[0] == "N,delta,value,clamp_count,wall_time_ms"
        assert all(line.endswith(",0.00000000e+00") for line in lines[1:])

    def test_dump_fields(self, temp_dir) -> None:
        target = temp_dir / "fields"
        run_solve(create_run_config(mode="solve", n_list=[4], dump_fields=target))

        names = sorted(path.name for path in target.iterdir())
        assert names == [f"field_N4_n{idx:04d}.csv" for idx in range(5)]

    def test_works_without_exact(self, nosol) -> None:
        report = run_solve(create_run_config(problem=nosol, n_list=[4]))
        assert report.summaries[0].value == pytest.approx(0.0, abs=1e-12)


class TestRunResidual:
    def test_gheat(self) -> None:
        worst = run_residual(create_run_config(mode="residual"))
        assert 0.0 <= worst < RESIDUAL_BOUND

    def test_csv(self) -> None:
        text = residual_to_csv("gheat", 2.5e-6)
        assert text == "problem,max_residual\ngheat,2.50000000e-06\n"

    def test_requires_exact_solution(self, nosol) -> None:
        with pytest.raises(ConfigurationError):
            run_residual(create_run_config(problem=nosol))


class TestRunOracle:
    def test_martingale(self, nosol) -> None:
        cfg = create_run_config(
            mode="oracle",
            problem=nosol,
            n_list=[2, 4],
            paths=TEST_PATHS,
            seed=TEST_SEED,
        )

        report = run_oracle(cfg)

        assert report.all_hold
        for row in report.rows:
            assert row.value == pytest.approx(0.0, abs=1e-12)
            assert row.tree_value == pytest.approx(0.0, abs=1e-12)
            assert abs(row.mc_mean) <= 4.0 * row.mc_stderr

    def test_tree_budget_reported_as_nan(self) -> None:
        report = OracleReport(
            rows=(
                OracleRow(
                    n_steps=16,
                    value=1.0,
                    tree_value=None,
                    mc_mean=0.9,
                    mc_stderr=0.01,
                    bound_holds=True,
                ),
            ),
        )

        lines = report.to_csv().splitlines()

        assert lines[0] == "N,value,tree_value,mc_mean,mc_stderr,bound_holds"
        assert lines[1].split(",")[2] == "nan"
        assert lines[1].endswith(",1")


class TestRun:
    @pytest.mark.parametrize(
        ("mode", "first_line"),
        [
            ("solve", "N,delta,value,clamp_count,wall_time_ms"),
            ("converge", CONVERGENCE_HEADER_LINE),
            ("residual", "problem,max_residual"),
        ],
    )
    def test_dispatch(self, mode, first_line) -> None:
        text = run(create_run_config(mode=mode, n_list=[4]))
        assert text.splitlines()[0] == first_line

    def test_dispatch_oracle(self, nosol) -> None:
        cfg = create_run_config(mode="oracle", problem=nosol, n_list=[2], paths=200)
        assert run(cfg).startswith("N,value,tree_value,")
