"""Depth-first branch-and-bound over binaries and exactly-one groups."""

import math

import numpy as np

from .program import (
    BINARY,
    MAXIMIZE,
    BudgetExceeded,
    NumericalInstability,
    Solution,
)
from .simplex import EPS_FEAS, solve_lp_arrays, _verify

_INT_TOL = 1e-6
_FLOW_TOL = 1e-9
_BOUND_TOL = 1e-9

DEFAULT_NODE_LIMIT = 10 ** 6


def _auto_integral(prog):
    """True when every objective term sits on a binary with an integer coefficient."""
    if not prog.objective:
        return True
    for idx, coef in prog.objective.items():
        if prog.variables[idx].kind != BINARY:
            return False
        if abs(coef - round(coef)) > 1e-12:
            return False
    return True


def _solve_node(A, senses, b, c, sense, uppers, fixed, n):
    """LP relaxation with the variables in `fixed` substituted out."""
    if fixed:
        free = [i for i in range(n) if i not in fixed]
        fixed_idx = sorted(fixed)
        vals = np.array([fixed[i] for i in fixed_idx])
        b_eff = b - A[:, fixed_idx] @ vals if len(b) else b
        A_eff = A[:, free]
        c_eff = c[free]
        u_eff = [uppers[i] for i in free]
        const = float(c[fixed_idx] @ vals)
        status, obj, xv = solve_lp_arrays(A_eff, senses, b_eff, c_eff, sense, u_eff)
        if status != "optimal":
            return status, None, None
        full = np.zeros(n)
        full[free] = xv
        for i in fixed_idx:
            full[i] = fixed[i]
        return status, obj + const, full
    return solve_lp_arrays(A, senses, b, c, sense, uppers)


def solve_mip(prog, node_limit=DEFAULT_NODE_LIMIT, integral_objective=None):
    """Globally optimal solve of a ConstraintProgram.

    Branches first on fractional binaries (lowest index), then on violated
    exactly-one groups (one child per designated-positive member, all other
    members fixed to zero). Depth-first with best-bound pruning; deterministic.

    Parameters
    ----------
    prog : ConstraintProgram
    node_limit : int
        Maximum nodes explored before raising BudgetExceeded.
    integral_objective : bool or None
        When True, bounds are rounded toward the incumbent before pruning
        (valid when every attainable objective is an integer). None
        auto-detects: all objective terms on binaries with integer coefficients.

    Returns
    -------
    Solution
    """
    A, senses, b, c = prog.dense()
    n = prog.n_vars
    sense = prog.sense
    maximize = sense == MAXIMIZE
    uppers = []
    for v in prog.variables:
        if v.kind == BINARY:
            u = 1.0 if v.upper is None else min(1.0, v.upper)
            uppers.append(u)
        else:
            uppers.append(v.upper)
    if integral_objective is None:
        integral_objective = _auto_integral(prog)

    binaries = prog.binary_indices()
    groups = [tuple(g) for g in prog.exactly_one_groups]

    incumbent = None  # (objective, x)
    stack = [{}]
    nodes = 0
    saw_unbounded_leaf = False

    def better(a, b_):
        return a > b_ + _BOUND_TOL if maximize else a < b_ - _BOUND_TOL

    def prunable(bound):
        if incumbent is None:
            return False
        inc = incumbent[0]
        if integral_objective:
            bound = math.floor(bound + 1e-9) if maximize else math.ceil(bound - 1e-9)
            inc = round(inc)
        return not (bound > inc + _BOUND_TOL if maximize else bound < inc - _BOUND_TOL)

    while stack:
        fixed = stack.pop()
        nodes += 1
        if nodes > node_limit:
            raise BudgetExceeded(f"branch-and-bound node limit {node_limit} exceeded")

        status, bound, x = _solve_node(A, senses, b, c, sense, uppers, fixed, n)
        if status == "infeasible":
            continue
        if status == "unbounded":
            # refine until the discrete variables are all fixed; an unbounded
            # relaxation with nothing left to fix is a truly unbounded program
            frac = next((i for i in binaries if i not in fixed), None)
            if frac is not None:
                for val in (1.0, 0.0):
                    child = dict(fixed)
                    child[frac] = val
                    stack.append(child)
                continue
            open_group = next(
                (g for g in groups
                 if sum(1 for mem in g if fixed.get(mem) != 0.0) > 1),
                None,
            )
            if open_group is not None:
                for keep_mem in reversed(open_group):
                    if any(mem != keep_mem and fixed.get(mem, 0.0) != 0.0
                           for mem in open_group):
                        continue  # contradicts an earlier nonzero fix
                    child = dict(fixed)
                    for mem in open_group:
                        if mem != keep_mem:
                            child[mem] = 0.0
                    stack.append(child)
                continue
            saw_unbounded_leaf = True
            break
        if prunable(bound):
            continue

        # branching target 1: fractional binary, lowest index
        frac = next(
            (i for i in binaries
             if i not in fixed and abs(x[i] - round(x[i])) > _INT_TOL),
            None,
        )
        if frac is not None:
            near = 1.0 if x[frac] >= 0.5 else 0.0
            for val in (1.0 - near, near):  # preferred child pushed last -> popped first
                child = dict(fixed)
                child[frac] = val
                stack.append(child)
            continue

        # branching target 2: violated exactly-one group, lowest index
        viol = next(
            (g for g in groups
             if sum(1 for mem in g if x[mem] > _FLOW_TOL) > 1),
            None,
        )
        if viol is not None:
            for keep_mem in reversed(viol):
                if any(mem != keep_mem and fixed.get(mem, 0.0) != 0.0
                       for mem in viol):
                    continue
                child = dict(fixed)
                for mem in viol:
                    if mem != keep_mem:
                        child[mem] = 0.0
                stack.append(child)
            continue

        # integral and group-feasible: candidate incumbent
        if incumbent is None or better(bound, incumbent[0]):
            incumbent = (bound, x.copy())

    if saw_unbounded_leaf:
        return Solution(status="unbounded")
    if incumbent is None:
        return Solution(status="infeasible")
    obj, x = incumbent
    if not _verify(prog, x):
        raise NumericalInstability("incumbent failed the feasibility recheck")
    for g in groups:
        if sum(1 for mem in g if x[mem] > max(_FLOW_TOL, EPS_FEAS)) > 1:
            raise NumericalInstability("incumbent violates an exactly-one group")
    return Solution(status="optimal", objective=float(obj), values=x,
                    names=tuple(v.name for v in prog.variables))
