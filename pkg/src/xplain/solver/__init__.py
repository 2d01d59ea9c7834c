"""Exact small-scale optimizer: primal simplex plus branch-and-bound."""

from .branch_bound import DEFAULT_NODE_LIMIT, solve_mip
from .lp_format import to_lp_format
from .program import (
    BINARY,
    CONTINUOUS,
    EQ,
    LE,
    MAXIMIZE,
    MINIMIZE,
    BudgetExceeded,
    Constraint,
    ConstraintProgram,
    NumericalInstability,
    Solution,
    SolverError,
    Variable,
)
from .simplex import EPS_FEAS, solve_lp

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "EQ",
    "LE",
    "MAXIMIZE",
    "MINIMIZE",
    "BudgetExceeded",
    "Constraint",
    "ConstraintProgram",
    "DEFAULT_NODE_LIMIT",
    "EPS_FEAS",
    "NumericalInstability",
    "Solution",
    "SolverError",
    "Variable",
    "solve_lp",
    "solve_mip",
    "to_lp_format",
]
