"""
Command-line interface for dc-gsocp.

Every command builds a :class:`~dc_gsocp.config.RunConfig` from its flags, the
optional ``--config`` file and ``GSOCP_*`` environment variables, runs the
experiment and writes CSV to ``--out`` or standard output. Diagnostics go to
standard error.
"""

import os
import sys
from pathlib import Path
from typing import Annotated, Any

import doctyper
from rich.panel import Panel

from . import __version__
from .config import RunConfig
from .problem.registry import get_registry
from .runner import (
    residual_to_csv,
    run,
    run_converge,
    run_oracle,
    run_residual,
    run_solve,
)
from .utils import logging
from .utils.cli import (
    console,
    create_error_panel,
    create_info_panel,
    create_problem_table,
    handle_common_errors,
    output_result,
    spinner_context,
)
from .utils.constants import DEBUG_ENV_VAR
from .utils.definitions import GridScale, InterpMethod, LogLevel, RunMode, SchemeKind
from .utils.exceptions import GsocpError

logger = logging.get_logger(__name__)

# Option constants (B008)
PROBLEM_OPT = doctyper.Option(help="Registered problem name (gheat, lq, sine, ...)")
SCHEME_OPT = doctyper.Option(help="Lattice scheme", case_sensitive=False)
GH_ORDER_OPT = doctyper.Option(help="Gauss-Hermite order L")
SIGMA_LO_OPT = doctyper.Option(help="Lower volatility bound")
SIGMA_HI_OPT = doctyper.Option(help="Upper volatility bound")
KAPPA_OPT = doctyper.Option(help="Mean-reversion rate (lq)")
R0_OPT = doctyper.Option(help="Discount rate (lq)")
N_LIST_OPT = doctyper.Option(help="Comma-separated step counts, e.g. 16,32,64")
X0_OPT = doctyper.Option(help="Initial state")
CONTROLS_OPT = doctyper.Option(help="Number of control samples M")
GRID_FACTOR_OPT = doctyper.Option(help="Grid factor c in dx = c*delta")
GRID_SCALE_OPT = doctyper.Option(
    help="Scale the grid spacing with delta or sqrt(delta)",
    case_sensitive=False,
)
GRID_SPACING_OPT = doctyper.Option(help="Explicit grid spacing (overrides grid factor)")
TRUNCATION_OPT = doctyper.Option(help="Clip reachable domains to x0 +/- radius")
INTERP_OPT = doctyper.Option(help="Interpolation method", case_sensitive=False)
STRICT_DOMAIN_OPT = doctyper.Option(help="Fail when a successor leaves the grid")
WORKERS_OPT = doctyper.Option(help="Worker threads for the backward step")
TIMINGS_OPT = doctyper.Option(help="Record wall times (off gives byte-identical CSV)")
OUT_OPT = doctyper.Option(help="Output CSV file (stdout when omitted)")
CONFIG_OPT = doctyper.Option(help="dotenv-style key=value run configuration")
DUMP_FIELDS_OPT = doctyper.Option(help="Directory receiving one CSV per value field")
SEED_OPT = doctyper.Option(help="Monte Carlo seed (unsigned 64-bit)")
PATHS_OPT = doctyper.Option(help="Monte Carlo paths")
THETA_OPT = doctyper.Option(help="Constant volatility of the simulated strategy")

VERSION_OPT = doctyper.Option(help="Show version and exit", is_flag=True)
DEBUG_OPT = doctyper.Option(help="Enable debug output")
LOGFIRE_OPT = doctyper.Option(help="Export logs through Logfire when installed")

app = doctyper.Typer(
    help="Lattice solvers for control problems under volatility uncertainty.",
)


class State:
    debug: bool = False


state = State()


def load_config(mode: RunMode, config: Path | None, **flags: Any) -> RunConfig:
    """Merge flags over the config file; flags left at None fall through."""
    return RunConfig.from_file(config, mode=mode, **flags)


@app.callback()
def app_callback(
    *,
    version: Annotated[bool, VERSION_OPT] = False,
    debug: Annotated[bool, DEBUG_OPT] = False,
    logfire: Annotated[bool, LOGFIRE_OPT] = False,
) -> None:
    """Lattice solvers for control problems under volatility uncertainty.

    Args:
        version: Show application version and exit
        debug: Enable debug output
        logfire: Export logs through Logfire
    """
    if version:
        doctyper.echo(f"gsocp version: {__version__}")
        raise doctyper.Exit()

    state.debug = debug
    if debug:
        os.environ.setdefault(DEBUG_ENV_VAR, "1")
    level: LogLevel = "DEBUG" if debug else "INFO"
    logging.setup_logging(level, use_logfire=logfire)
    logger.debug("cli initialized", version=__version__, debug=debug)


@app.command("version")
def version_command() -> None:
    """Show the application version."""
    console.print(
        Panel(
            f"gsocp version: [bold cyan]{__version__}[/bold cyan]",
            title="Version Information",
            border_style="blue",
            padding=(1, 2),
        ),
    )


@app.command("problems")
@handle_common_errors
def problems_command() -> None:
    """List registered problems and their default parameters."""
    registry = get_registry()
    rows = []
    for name in registry.names():
        entry = registry.get(name)
        rows.append((name, entry.description, dict(entry.defaults)))
    console.print(create_problem_table(rows))


@app.command("solve")
@handle_common_errors
def solve_command(
    *,
    problem: Annotated[str | None, PROBLEM_OPT] = None,
    scheme: Annotated[SchemeKind | None, SCHEME_OPT] = None,
    gh_order: Annotated[int | None, GH_ORDER_OPT] = None,
    sigma_lo: Annotated[float | None, SIGMA_LO_OPT] = None,
    sigma_hi: Annotated[float | None, SIGMA_HI_OPT] = None,
    kappa: Annotated[float | None, KAPPA_OPT] = None,
    r0: Annotated[float | None, R0_OPT] = None,
    n_list: Annotated[str | None, N_LIST_OPT] = None,
    x0: Annotated[float | None, X0_OPT] = None,
    controls: Annotated[int | None, CONTROLS_OPT] = None,
    grid_factor: Annotated[float | None, GRID_FACTOR_OPT] = None,
    grid_scale: Annotated[GridScale | None, GRID_SCALE_OPT] = None,
    grid_spacing: Annotated[float | None, GRID_SPACING_OPT] = None,
    truncation_radius: Annotated[float | None, TRUNCATION_OPT] = None,
    interp: Annotated[InterpMethod | None, INTERP_OPT] = None,
    strict_domain: Annotated[bool | None, STRICT_DOMAIN_OPT] = None,
    workers: Annotated[int | None, WORKERS_OPT] = None,
    timings: Annotated[bool | None, TIMINGS_OPT] = None,
    dump_fields: Annotated[Path | None, DUMP_FIELDS_OPT] = None,
    out: Annotated[Path | None, OUT_OPT] = None,
    config: Annotated[Path | None, CONFIG_OPT] = None,
) -> None:
    """Solve once per N and report value, clamp count and wall time."""
    cfg = load_config(
        RunMode.SOLVE,
        config,
        problem=problem,
        scheme=scheme,
        gh_order=gh_order,
        sigma_lo=sigma_lo,
        sigma_hi=sigma_hi,
        kappa=kappa,
        r0=r0,
        n_list=n_list,
        x0=x0,
        controls=controls,
        grid_factor=grid_factor,
        grid_scale=grid_scale,
        grid_spacing=grid_spacing,
        truncation_radius=truncation_radius,
        interp=interp,
        strict_domain=strict_domain,
        workers=workers,
        timings=timings,
        dump_fields=dump_fields,
        out=out,
    )
    with spinner_context(f"Solving {cfg.problem}..."):
        report = run_solve(cfg)
    output_result(report.to_csv(), cfg.out)


@app.command("converge")
@handle_common_errors
def converge_command(
    *,
    problem: Annotated[str | None, PROBLEM_OPT] = None,
    scheme: Annotated[SchemeKind | None, SCHEME_OPT] = None,
    gh_order: Annotated[int | None, GH_ORDER_OPT] = None,
    sigma_lo: Annotated[float | None, SIGMA_LO_OPT] = None,
    sigma_hi: Annotated[float | None, SIGMA_HI_OPT] = None,
    kappa: Annotated[float | None, KAPPA_OPT] = None,
    r0: Annotated[float | None, R0_OPT] = None,
    n_list: Annotated[str | None, N_LIST_OPT] = None,
    x0: Annotated[float | None, X0_OPT] = None,
    controls: Annotated[int | None, CONTROLS_OPT] = None,
    grid_factor: Annotated[float | None, GRID_FACTOR_OPT] = None,
    grid_scale: Annotated[GridScale | None, GRID_SCALE_OPT] = None,
    grid_spacing: Annotated[float | None, GRID_SPACING_OPT] = None,
    truncation_radius: Annotated[float | None, TRUNCATION_OPT] = None,
    interp: Annotated[InterpMethod | None, INTERP_OPT] = None,
    strict_domain: Annotated[bool | None, STRICT_DOMAIN_OPT] = None,
    workers: Annotated[int | None, WORKERS_OPT] = None,
    timings: Annotated[bool | None, TIMINGS_OPT] = None,
    out: Annotated[Path | None, OUT_OPT] = None,
    config: Annotated[Path | None, CONFIG_OPT] = None,
) -> None:
    """Error table against the exact solution with the fitted convergence rate."""
    cfg = load_config(
        RunMode.CONVERGE,
        config,
        problem=problem,
        scheme=scheme,
        gh_order=gh_order,
        sigma_lo=sigma_lo,
        sigma_hi=sigma_hi,
        kappa=kappa,
        r0=r0,
        n_list=n_list,
        x0=x0,
        controls=controls,
        grid_factor=grid_factor,
        grid_scale=grid_scale,
        grid_spacing=grid_spacing,
        truncation_radius=truncation_radius,
        interp=interp,
        strict_domain=strict_domain,
        workers=workers,
        timings=timings,
        out=out,
    )
    with spinner_context(f"Convergence study for {cfg.problem}..."):
        report = run_converge(cfg)
    output_result(report.to_csv(), cfg.out)
    panel = create_info_panel(f"CR = {report.rate:.3f}", title="Convergence rate")
    console.print(panel)


@app.command("residual")
@handle_common_errors
def residual_command(
    *,
    problem: Annotated[str | None, PROBLEM_OPT] = None,
    sigma_lo: Annotated[float | None, SIGMA_LO_OPT] = None,
    sigma_hi: Annotated[float | None, SIGMA_HI_OPT] = None,
    kappa: Annotated[float | None, KAPPA_OPT] = None,
    r0: Annotated[float | None, R0_OPT] = None,
    x0: Annotated[float | None, X0_OPT] = None,
    controls: Annotated[int | None, CONTROLS_OPT] = None,
    out: Annotated[Path | None, OUT_OPT] = None,
    config: Annotated[Path | None, CONFIG_OPT] = None,
) -> None:
    """Largest HJB residual of the exact solution on a 5x5 interior sample."""
    cfg = load_config(
        RunMode.RESIDUAL,
        config,
        problem=problem,
        sigma_lo=sigma_lo,
        sigma_hi=sigma_hi,
        kappa=kappa,
        r0=r0,
        x0=x0,
        controls=controls,
        out=out,
    )
    output_result(residual_to_csv(cfg.problem, run_residual(cfg)), cfg.out)


@app.command("oracle")
@handle_common_errors
def oracle_command(
    *,
    problem: Annotated[str | None, PROBLEM_OPT] = None,
    scheme: Annotated[SchemeKind | None, SCHEME_OPT] = None,
    gh_order: Annotated[int | None, GH_ORDER_OPT] = None,
    sigma_lo: Annotated[float | None, SIGMA_LO_OPT] = None,
    sigma_hi: Annotated[float | None, SIGMA_HI_OPT] = None,
    kappa: Annotated[float | None, KAPPA_OPT] = None,
    r0: Annotated[float | None, R0_OPT] = None,
    n_list: Annotated[str | None, N_LIST_OPT] = None,
    x0: Annotated[float | None, X0_OPT] = None,
    controls: Annotated[int | None, CONTROLS_OPT] = None,
    grid_factor: Annotated[float | None, GRID_FACTOR_OPT] = None,
    grid_scale: Annotated[GridScale | None, GRID_SCALE_OPT] = None,
    grid_spacing: Annotated[float | None, GRID_SPACING_OPT] = None,
    interp: Annotated[InterpMethod | None, INTERP_OPT] = None,
    workers: Annotated[int | None, WORKERS_OPT] = None,
    seed: Annotated[int | None, SEED_OPT] = None,
    paths: Annotated[int | None, PATHS_OPT] = None,
    theta: Annotated[float | None, THETA_OPT] = None,
    out: Annotated[Path | None, OUT_OPT] = None,
    config: Annotated[Path | None, CONFIG_OPT] = None,
) -> None:
    """Cross-check solver values against the tree and a Monte Carlo lower bound."""
    cfg = load_config(
        RunMode.ORACLE,
        config,
        problem=problem,
        scheme=scheme,
        gh_order=gh_order,
        sigma_lo=sigma_lo,
        sigma_hi=sigma_hi,
        kappa=kappa,
        r0=r0,
        n_list=n_list,
        x0=x0,
        controls=controls,
        grid_factor=grid_factor,
        grid_scale=grid_scale,
        grid_spacing=grid_spacing,
        interp=interp,
        workers=workers,
        seed=seed,
        paths=paths,
        theta=theta,
        out=out,
    )
    with spinner_context(f"Running oracles for {cfg.problem}..."):
        report = run_oracle(cfg)
    output_result(report.to_csv(), cfg.out)
    if not report.all_hold:
        logger.warning("monte carlo bound violated", problem=cfg.problem)


@app.command("run")
@handle_common_errors
def run_command(
    config: Annotated[Path, CONFIG_OPT],
    *,
    out: Annotated[Path | None, OUT_OPT] = None,
) -> None:
    """Run the experiment recorded in a configuration file, mode included."""
    cfg = RunConfig.from_file(config, out=out)
    output_result(run(cfg), cfg.out)


def main() -> None:
    """Run the CLI application."""
    try:
        app()
    except GsocpError as e:
        console.print(create_error_panel(str(e), title="gsocp error"))
        sys.exit(1)


if __name__ == "__main__":
    main()
