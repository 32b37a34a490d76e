"""
Constants for dc-gsocp.

This module contains the defaults and error message templates used across the
package. Centralizing them avoids circular imports between the numeric modules.
"""

# -------------------------------------------------------
# Lattices
# -------------------------------------------------------
MIN_GH_ORDER = 2
MAX_GH_ORDER = 64
DEFAULT_GH_ORDER = 6
WEIGHT_SUM_TOLERANCE = 1e-12
MOMENT_TOLERANCE = 1e-12
# Relative to max(1, sigma**2).
SECOND_MOMENT_TOLERANCE = 1e-10

# -------------------------------------------------------
# Solver defaults
# -------------------------------------------------------
DEFAULT_CONTROL_SAMPLES = 65
DEFAULT_GRID_FACTOR = 1.0
DEFAULT_EXTRA_LEVELS = 0
# Upper bound on the number of successor evaluations held in memory at once.
DEFAULT_CHUNK_ELEMENTS = 1_000_000
NODE_SNAP_TOLERANCE = 1e-9
CLAMP_TOLERANCE = 1e-7

# -------------------------------------------------------
# Oracles
# -------------------------------------------------------
MAX_TREE_STEPS = 8
MAX_TREE_LEAVES = 20_000_000
MIN_MC_PATHS = 100
DEFAULT_MC_PATHS = 100_000
DEFAULT_MC_CHUNK = 4096
DEFAULT_SEED = 20240101
DEFAULT_FD_STEP = 1e-4
RESIDUAL_CONTROL_SAMPLES = 201

# -------------------------------------------------------
# Output
# -------------------------------------------------------
CSV_FLOAT_FORMAT = "{:.8e}"
CONVERGENCE_HEADER = ("N", "delta", "value", "exact", "abs_error", "wall_time_ms")
FIELD_HEADER = ("x", "value", "argmax_control", "argmax_sigma")
RATE_ROW_LABEL = "CR"

# -------------------------------------------------------
# Configuration
# -------------------------------------------------------
CONFIG_ENV_PREFIX = "GSOCP_"
DEBUG_ENV_VAR = "GSOCP_DEBUG"
PROBLEM_ENTRY_POINT_GROUP = "dc_gsocp.problems"
PLUGIN_NAMESPACE = "dc_gsocp"

# -------------------------------------------------------
# Error message templates
# -------------------------------------------------------
GH_ORDER_TOO_SMALL_ERROR = "Gauss-Hermite order must be at least {}, got {}"
GH_ORDER_TOO_LARGE_ERROR = "Gauss-Hermite order {} exceeds the supported maximum {}"
NEGATIVE_VOLATILITY_ERROR = "Volatility level must be nonnegative, got {}"
TRINOMIAL_VOLATILITY_ERROR = "Trinomial lattice needs sigma <= 1, got {}"
LATTICE_INVARIANT_ERROR = "Lattice invariant violated: {}"
SIGMA_ORDER_ERROR = "sigma_lo ({}) must not exceed sigma_hi ({})"
SIGMA_FINITE_ERROR = "sigma_hi must be finite"
CONTROL_INTERVAL_ERROR = "Control interval lower bound {} exceeds upper bound {}"
CONTROL_EMPTY_ERROR = "Control set must contain at least one point"
CONTROL_SAMPLES_ERROR = "Control sample count must be positive, got {}"
DIMENSION_ERROR = "Only one-dimensional Brownian motion is supported, got m={}"
DEGENERATE_LQ_ERROR = "kappa ({}) must differ from 2*r0 ({})"
GHEAT_SIGMA_ERROR = "G-heat terminal function needs sigma_lo > 0"
NONFINITE_COEFFICIENT_ERROR = "Coefficient {} is not finite at t={}, x={}, a={}"
DOMAIN_GROWTH_ERROR = "Reachable domain bound is not finite at level {}"
DOMAIN_VIOLATION_ERROR = "{} successor evaluation(s) left the grid at level {}"
POLICY_NOT_RECORDED_ERROR = "Policy was not recorded for this solve"
TREE_BUDGET_ERROR = "Tree with N={} and {} leaves exceeds the budget (N<={}, {} leaves)"
LOG_DOMAIN_ERROR = "Rate fitting needs positive errors and step sizes, got {}"
RATE_POINTS_ERROR = "Rate fitting needs at least two points, got {}"
THETA_RANGE_ERROR = "theta={} lies outside the volatility interval [{}, {}]"
MC_PATHS_ERROR = "Monte Carlo needs at least {} paths, got {}"
STEPS_ERROR = "Number of time steps must be positive, got {}"
FD_STEP_ERROR = "Finite-difference stencil around t={} leaves [0, {}]"
RESIDUAL_TIME_ERROR = "Residual evaluation needs 0 < t < T, got t={}"
UNKNOWN_PROBLEM_ERROR = "Unknown problem '{}'. Available: {}"
N_LIST_EMPTY_ERROR = "n_list must not be empty"
N_LIST_ORDER_ERROR = "n_list must be strictly increasing positive integers"
NO_EXACT_SOLUTION_ERROR = "Problem '{}' has no closed-form solution to compare against"
CONFIG_FILE_NOT_FOUND_ERROR = "Config file not found: {}"
CONFIG_INVALID_ERROR = "Invalid configuration: {}"
CSV_PARSE_ERROR = "Malformed convergence CSV: {}"
GRID_SPACING_ERROR = "Grid spacing must be positive, got {}"
GRID_NODES_ERROR = "Grid needs lo < hi and at least two nodes"
