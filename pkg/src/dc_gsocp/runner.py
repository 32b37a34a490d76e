"""
Experiment runners behind the command-line interface.

Each runner takes a :class:`RunConfig`, performs the solves it describes and
returns a report object that renders to CSV.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .oracle import fit_rate, mc_lower_bound, tree_value
from .problem.registry import get_problem
from .problem.spec import ExactSolution, ProblemSpec, hjb_residual
from .solver import SolveResult, solve
from .utils.constants import (
    CONVERGENCE_HEADER,
    CSV_PARSE_ERROR,
    DEFAULT_FD_STEP,
    NO_EXACT_SOLUTION_ERROR,
    RATE_ROW_LABEL,
    RESIDUAL_CONTROL_SAMPLES,
)
from .utils.definitions import RunMode
from .utils.exceptions import (
    BudgetExceededError,
    ConfigurationError,
    InvalidParameterError,
    LogDomainError,
)
from .utils.formatting import format_float, read_rows, rows_to_text
from .utils.logging import get_logger

logger = get_logger(__name__)

ORACLE_HEADER = ("N", "value", "tree_value", "mc_mean", "mc_stderr", "bound_holds")
RESIDUAL_HEADER = ("problem", "max_residual")
SOLVE_HEADER = ("N", "delta", "value", "clamp_count", "wall_time_ms")
RESIDUAL_TIMES = np.linspace(1.0 / 6.0, 5.0 / 6.0, 5)
RESIDUAL_OFFSETS = np.array([-0.9, -0.45, 0.0, 0.45, 0.9])
MC_ALLOWANCE = 0.01


@dataclass(frozen=True)
class ConvergenceRow:
    n_steps: int
    delta: float
    value: float
    exact: float
    abs_error: float
    wall_time_ms: float

    def cells(self) -> tuple[int, float, float, float, float, float]:
        return (
            self.n_steps,
            self.delta,
            self.value,
            self.exact,
            self.abs_error,
            self.wall_time_ms,
        )


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors against the exact value per N and the fitted rate."""

    rows: tuple[ConvergenceRow, ...]
    rate: float

    @property
    def errors(self) -> list[float]:
        return [row.abs_error for row in self.rows]

    def to_csv(self) -> str:
        body = rows_to_text(CONVERGENCE_HEADER, [row.cells() for row in self.rows])
        return f"{body}{RATE_ROW_LABEL},{format_float(self.rate)}\n"

    @classmethod
    def from_csv(cls, text: str) -> "ConvergenceReport":
        """Parse the output of :meth:`to_csv`."""
        try:
            header, lines = read_rows(text)
        except ValueError as exc:
            raise InvalidParameterError(str(exc)) from exc
        if tuple(header) != CONVERGENCE_HEADER:
            raise InvalidParameterError(CSV_PARSE_ERROR.format(f"header {header}"))
        if not lines or lines[-1][0] != RATE_ROW_LABEL or len(lines[-1]) != 2:
            raise InvalidParameterError(CSV_PARSE_ERROR.format("missing rate line"))
        try:
            rows = tuple(
                ConvergenceRow(
                    n_steps=int(line[0]),
                    delta=float(line[1]),
                    value=float(line[2]),
                    exact=float(line[3]),
                    abs_error=float(line[4]),
                    wall_time_ms=float(line[5]),
                )
                for line in lines[:-1]
            )
            rate = float(lines[-1][1])
        except (IndexError, ValueError) as exc:
            raise InvalidParameterError(CSV_PARSE_ERROR.format(exc)) from exc
        return cls(rows=rows, rate=rate)


@dataclass(frozen=True)
class SolveSummary:
    n_steps: int
    value: float
    clamp_count: int
    wall_time: float
    result: SolveResult


@dataclass(frozen=True)
class SolveReport:
    summaries: tuple[SolveSummary, ...]
    timings: bool = True

    def to_csv(self) -> str:
        return rows_to_text(
            SOLVE_HEADER,
            [
                (
                    s.n_steps,
                    s.result.delta,
                    s.value,
                    s.clamp_count,
                    s.wall_time * 1000.0 if self.timings else 0.0,
                )
                for s in self.summaries
            ],
        )


@dataclass(frozen=True)
class OracleRow:
    n_steps: int
    value: float
    tree_value: float | None
    mc_mean: float
    mc_stderr: float
    bound_holds: bool


@dataclass(frozen=True)
class OracleReport:
    rows: tuple[OracleRow, ...]

    @property
    def all_hold(self) -> bool:
        return all(row.bound_holds for row in self.rows)

    def to_csv(self) -> str:
        return rows_to_text(
            ORACLE_HEADER,
            [
                (
                    r.n_steps,
                    r.value,
                    float("nan") if r.tree_value is None else r.tree_value,
                    r.mc_mean,
                    r.mc_stderr,
                    r.bound_holds,
                )
                for r in self.rows
            ],
        )


def build_problem(cfg: RunConfig) -> tuple[ProblemSpec, ExactSolution | None]:
    return get_problem(cfg.problem, **cfg.problem_overrides())


def _require_exact(cfg: RunConfig, exact: ExactSolution | None) -> ExactSolution:
    if exact is None:
        raise ConfigurationError(NO_EXACT_SOLUTION_ERROR.format(cfg.problem))
    return exact


def _check_scheme(cfg: RunConfig, problem: ProblemSpec) -> None:
    # Fails early for a trinomial family with sigma_hi > 1.
    cfg.solver_config(cfg.n_list[0]).family(problem.gparams)


def _dump_fields(result: SolveResult, directory: Path) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for field in result.fields:
        target = directory / f"field_N{result.n_steps}_n{field.time_index:04d}.csv"
        field.to_csv(target, result.controls, result.sigma_levels)


def run_solve(cfg: RunConfig) -> SolveReport:
    """Solve once per N; optionally dump every value field."""
    problem, _ = build_problem(cfg)
    _check_scheme(cfg, problem)
    summaries = []
    for n_steps in cfg.n_list:
        result = solve(problem, cfg.x0, cfg.solver_config(n_steps))
        summaries.append(
            SolveSummary(
                n_steps=n_steps,
                value=result.value_at_start,
                clamp_count=result.clamp_count,
                wall_time=result.wall_time,
                result=result,
            ),
        )
        if cfg.dump_fields is not None:
            _dump_fields(result, cfg.dump_fields)
    return SolveReport(summaries=tuple(summaries), timings=cfg.timings)


def run_converge(cfg: RunConfig) -> ConvergenceReport:
    """Solve for every N and compare with the exact value at ``(0, x0)``."""
    problem, exact = build_problem(cfg)
    solution = _require_exact(cfg, exact)
    _check_scheme(cfg, problem)
    exact_value = float(solution.value(0.0, cfg.x0))

    rows = []
    for n_steps in cfg.n_list:
        result = solve(problem, cfg.x0, cfg.solver_config(n_steps))
        rows.append(
            ConvergenceRow(
                n_steps=n_steps,
                delta=result.delta,
                value=result.value_at_start,
                exact=exact_value,
                abs_error=abs(result.value_at_start - exact_value),
                wall_time_ms=result.wall_time * 1000.0 if cfg.timings else 0.0,
            ),
        )
        logger.info("convergence point", n_steps=n_steps, abs_error=rows[-1].abs_error)

    rate = float("nan")
    if len(rows) > 1:
        try:
            rate = fit_rate([r.delta for r in rows], [r.abs_error for r in rows])
        except LogDomainError:
            logger.warning("rate undefined", errors=[r.abs_error for r in rows])
    return ConvergenceReport(rows=tuple(rows), rate=rate)


def run_residual(cfg: RunConfig) -> float:
    """Largest HJB residual of the exact solution on a 5x5 interior sample."""
    problem, exact = build_problem(cfg)
    solution = _require_exact(cfg, exact)
    samples = cfg.controls or RESIDUAL_CONTROL_SAMPLES

    def value(t: float, x: float) -> float:
        return float(solution.value(t, x))

    worst = 0.0
    for t in RESIDUAL_TIMES * problem.horizon:
        for x in cfg.x0 + RESIDUAL_OFFSETS:
            residual = hjb_residual(
                problem,
                value,
                float(t),
                float(x),
                DEFAULT_FD_STEP,
                samples,
            )
            worst = max(worst, abs(residual))
    logger.info("residual check", problem=cfg.problem, max_residual=worst)
    return worst


def run_oracle(cfg: RunConfig) -> OracleReport:
    """
    Cross-check solves against the tree and a Monte Carlo lower bound.

    The simulated strategy uses ``theta`` (default ``sigma_hi``) and the exact
    optimal control when known, otherwise the solver's recorded policy.
    """
    problem, exact = build_problem(cfg)
    _check_scheme(cfg, problem)
    theta = cfg.theta if cfg.theta is not None else problem.gparams.sigma_hi

    rows = []
    for n_steps in cfg.n_list:
        solver_cfg = cfg.solver_config(n_steps)
        result = solve(problem, cfg.x0, solver_cfg)
        try:
            tree = tree_value(
                problem,
                cfg.x0,
                n_steps,
                solver_cfg.family(problem.gparams),
                cfg.controls,
            )
        except BudgetExceededError:
            tree = None

        if exact is not None and exact.optimal_control is not None:
            policy = exact.optimal_control
        else:
            policy = result.feedback_policy()
        estimate = mc_lower_bound(
            problem,
            cfg.x0,
            n_steps,
            theta,
            policy,
            cfg.paths,
            cfg.seed,
        )
        holds = estimate.lower_bound_holds(result.value_at_start, MC_ALLOWANCE)
        rows.append(
            OracleRow(
                n_steps=n_steps,
                value=result.value_at_start,
                tree_value=tree,
                mc_mean=estimate.mean,
                mc_stderr=estimate.stderr,
                bound_holds=holds,
            ),
        )
    return OracleReport(rows=tuple(rows))


def residual_to_csv(problem: str, max_residual: float) -> str:
    return rows_to_text(RESIDUAL_HEADER, [(problem, max_residual)])


def run(cfg: RunConfig) -> str:
    """Execute ``cfg.mode`` and render its report as CSV text."""
    logger.info(
        "run started",
        mode=cfg.mode.value,
        problem=cfg.problem,
        n_list=cfg.n_list,
    )
    if cfg.mode is RunMode.SOLVE:
        return run_solve(cfg).to_csv()
    if cfg.mode is RunMode.CONVERGE:
        return run_converge(cfg).to_csv()
    if cfg.mode is RunMode.RESIDUAL:
        return residual_to_csv(cfg.problem, run_residual(cfg))
    return run_oracle(cfg).to_csv()
