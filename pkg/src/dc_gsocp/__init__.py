"""
dc-gsocp: stochastic optimal control under volatility uncertainty.

Backward dynamic programming on lattices that match the moments of the
uncertain volatility law, for control problems whose value is a sublinear
(G-)expectation.

Features:
- Trinomial and Gauss-Hermite lattice families
- Backward solver on aligned grids with linear or monotone cubic interpolation
- Brute-force tree and Monte Carlo oracles
- Built-in problems with closed-form solutions, extensible through plugins
- Convergence studies written as CSV
"""

from . import utils
from .config import RunConfig, build_run_config
from .grid import Grid1D, ValueField, interpolate, reachable_domain, reachable_domains
from .lattice import (
    Lattice,
    LatticeFamily,
    QuadratureRule,
    gauss_hermite_rule,
    guaranteed_rate,
    lattice_moment,
    make_family,
    make_gh_lattice,
    make_trinomial_lattice,
    sublinear_expectation,
)
from .oracle import McEstimate, fit_rate, mc_lower_bound, successive_rates, tree_value
from .problem import (
    ControlSet,
    ExactSolution,
    GParams,
    ProblemSpec,
    available_problems,
    builtin_gheat,
    builtin_lq,
    builtin_sine,
    g_function,
    get_problem,
    hjb_residual,
)
from .runner import (
    ConvergenceReport,
    OracleReport,
    SolveReport,
    run_converge,
    run_oracle,
    run_residual,
    run_solve,
)
from .solver import (
    SolveResult,
    SolverConfig,
    backward_step,
    extract_policy,
    solve,
    successor,
)
from .utils.definitions import GridScale, InterpMethod, RunMode, SchemeKind
from .utils.exceptions import (
    BudgetExceededError,
    ConfigurationError,
    DomainError,
    GsocpError,
    InvalidParameterError,
    LatticeError,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConfigurationError",
    "ControlSet",
    "ConvergenceReport",
    "DomainError",
    "ExactSolution",
    "GParams",
    "Grid1D",
    "GridScale",
    "GsocpError",
    "InterpMethod",
    "InvalidParameterError",
    "Lattice",
    "LatticeError",
    "LatticeFamily",
    "McEstimate",
    "OracleReport",
    "ProblemSpec",
    "QuadratureRule",
    "RunConfig",
    "RunMode",
    "SchemeKind",
    "SolveReport",
    "SolveResult",
    "SolverConfig",
    "SolverError",
    "ValueField",
    "__version__",
    "available_problems",
    "backward_step",
    "build_run_config",
    "builtin_gheat",
    "builtin_lq",
    "builtin_sine",
    "extract_policy",
    "fit_rate",
    "g_function",
    "gauss_hermite_rule",
    "get_problem",
    "guaranteed_rate",
    "hjb_residual",
    "interpolate",
    "lattice_moment",
    "make_family",
    "make_gh_lattice",
    "make_trinomial_lattice",
    "mc_lower_bound",
    "reachable_domain",
    "reachable_domains",
    "run_converge",
    "run_oracle",
    "run_residual",
    "run_solve",
    "solve",
    "successive_rates",
    "successor",
    "tree_value",
    "utils",
]
