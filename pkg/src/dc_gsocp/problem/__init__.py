"""
Control problems: specification types, built-in examples and the registry.
"""

from .builtins import builtin_gheat, builtin_lq, builtin_sine, gheat_terminal
from .registry import (
    ProblemEntry,
    ProblemRegistry,
    available_problems,
    get_problem,
    get_registry,
    problem_defaults,
)
from .spec import (
    Coefficients,
    ControlSet,
    ExactSolution,
    GParams,
    ProblemSpec,
    evaluate_coefficients,
    g_function,
    hjb_residual,
)

__all__ = [
    "Coefficients",
    "ControlSet",
    "ExactSolution",
    "GParams",
    "ProblemEntry",
    "ProblemRegistry",
    "ProblemSpec",
    "available_problems",
    "builtin_gheat",
    "builtin_lq",
    "builtin_sine",
    "evaluate_coefficients",
    "g_function",
    "gheat_terminal",
    "get_problem",
    "get_registry",
    "hjb_residual",
    "problem_defaults",
]
