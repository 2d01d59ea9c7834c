"""Two-phase dense primal simplex with Bland's rule.

Desk-scale by design (~hundreds of variables). The tableau is a dense numpy
array; Bland's pivoting rule guarantees termination, and every reported
optimum is re-checked against the original rows so numerical trouble is
reported (NumericalInstability) instead of returned silently.
"""

import numpy as np

from .program import (
    BINARY,
    EQ,
    LE,
    MAXIMIZE,
    MINIMIZE,
    NumericalInstability,
    Solution,
)

EPS_FEAS = 1e-6       # constraint-satisfaction tolerance
PIVOT_TOL = 1e-10     # entries at or below this act as zero in the ratio test
_RC_TOL = 1e-9        # reduced-cost threshold for optimality
_PHASE1_TOL = 1e-7    # residual infeasibility treated as infeasible


def _pivot(T, z, basis, r, j):
    piv = T[r, j]
    if abs(piv) < PIVOT_TOL:
        raise NumericalInstability(f"pivot {piv:.3e} below tolerance")
    T[r] = T[r] / piv
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    z -= z[j] * T[r]
    basis[r] = j


def _run(T, z, basis, max_iter):
    """Minimize until no negative reduced cost remains. Bland's rule."""
    basis_arr = basis
    for _ in range(max_iter):
        neg = np.nonzero(z[:-1] < -_RC_TOL)[0]
        if neg.size == 0:
            return "optimal"
        j = int(neg[0])
        col = T[:, j]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            return "unbounded"
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12]
        # anti-cycling: among tied rows leave the lowest-index basic variable
        r = int(tied[np.argmin([basis_arr[t] for t in tied])])
        _pivot(T, z, basis_arr, r, j)
    raise NumericalInstability("simplex iteration limit reached")


def solve_lp_arrays(A, senses, b, c, sense=MAXIMIZE, uppers=None):
    """Solve {opt c.x : A x (<=,==) b, 0 <= x (<= uppers)}.

    Returns (status, objective, x). `uppers` is an optional array with np.inf
    for unbounded-above variables.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m0, n = A.shape if A.size else (len(b), len(c))
    if A.size == 0:
        A = A.reshape(m0, n)

    # empty-row screening: a row with no coefficients is a tautology or a
    # contradiction and would otherwise confuse the tableau construction
    keep = []
    for r in range(m0):
        if np.any(np.abs(A[r]) > 0.0):
            keep.append(r)
            continue
        rhs = b[r]
        ok = rhs >= -EPS_FEAS if senses[r] == LE else abs(rhs) <= EPS_FEAS
        if not ok:
            return "infeasible", None, None
    if len(keep) < m0:
        A = A[keep]
        b = b[keep]
        senses = [senses[r] for r in keep]
    m = len(b)

    rows = [A]
    rhs = [b]
    row_senses = list(senses)
    if uppers is not None:
        for i, u in enumerate(uppers):
            if u is not None and np.isfinite(u):
                e = np.zeros(n)
                e[i] = 1.0
                rows.append(e.reshape(1, -1))
                rhs.append(np.array([u]))
                row_senses.append(LE)
    A = np.vstack(rows) if len(rows) > 1 else A
    b = np.concatenate(rhs) if len(rhs) > 1 else b
    m = len(b)

    # normalize rhs >= 0; "<=" rows with negative rhs flip to ">="
    geq = np.zeros(m, dtype=bool)
    for r in range(m):
        if b[r] < 0:
            A[r] = -A[r]
            b[r] = -b[r]
            if row_senses[r] == LE:
                geq[r] = True

    n_slack = sum(1 for r in range(m) if row_senses[r] == LE and not geq[r])
    n_art = sum(1 for r in range(m) if row_senses[r] == EQ or geq[r])
    # geq rows need both a surplus and an artificial
    n_surplus = int(np.count_nonzero(geq))
    ncols = n + n_slack + n_surplus + n_art
    T = np.zeros((m, ncols + 1))
    T[:, :n] = A
    T[:, -1] = b
    basis = [-1] * m
    s = n
    a = n + n_slack + n_surplus
    art_cols = []
    for r in range(m):
        if row_senses[r] == LE and not geq[r]:
            T[r, s] = 1.0
            basis[r] = s
            s += 1
        elif geq[r]:
            T[r, s] = -1.0
            s += 1
            T[r, a] = 1.0
            basis[r] = a
            art_cols.append(a)
            a += 1
        else:  # EQ
            T[r, a] = 1.0
            basis[r] = a
            art_cols.append(a)
            a += 1

    max_iter = 2000 + 200 * (m + ncols)

    if art_cols:
        z = np.zeros(ncols + 1)
        for col in art_cols:
            z[col] = 1.0
        for r in range(m):
            if basis[r] in art_cols:
                z -= T[r]
        status = _run(T, z, basis, max_iter)
        if status != "optimal":
            raise NumericalInstability("phase 1 reported unbounded")
        if -z[-1] > _PHASE1_TOL:
            return "infeasible", None, None
        # drive remaining artificials out of the basis
        art_set = set(art_cols)
        drop_rows = []
        for r in range(m):
            if basis[r] in art_set:
                cand = [j for j in range(n + n_slack + n_surplus)
                        if abs(T[r, j]) > PIVOT_TOL]
                if cand:
                    _pivot(T, z, basis, r, cand[0])
                else:
                    drop_rows.append(r)
        if drop_rows:
            keep_rows = [r for r in range(m) if r not in set(drop_rows)]
            T = T[keep_rows]
            basis = [basis[r] for r in keep_rows]
            m = len(keep_rows)
        # cut artificial columns off the tableau
        T = np.hstack([T[:, : n + n_slack + n_surplus], T[:, -1:]])
        ncols = n + n_slack + n_surplus

    minimize = sense == MINIMIZE
    c_int = c if minimize else -c
    z = np.zeros(ncols + 1)
    z[:n] = c_int
    for r in range(m):
        if basis[r] >= 0 and abs(z[basis[r]]) > 0.0:
            z -= z[basis[r]] * T[r]
    status = _run(T, z, basis, max_iter)
    if status == "unbounded":
        return "unbounded", None, None

    x = np.zeros(ncols)
    for r in range(m):
        x[basis[r]] = T[r, -1]
    xv = x[:n]
    obj = float(c @ xv)
    return "optimal", obj, xv


def _verify(prog, xv):
    A, senses, b, _ = prog.dense()
    if A.size:
        lhs = A @ xv
        for r, sense in enumerate(senses):
            if sense == LE and lhs[r] > b[r] + EPS_FEAS:
                return False
            if sense == EQ and abs(lhs[r] - b[r]) > EPS_FEAS:
                return False
    if np.any(xv < -EPS_FEAS):
        return False
    for i, var in enumerate(prog.variables):
        if var.upper is not None and xv[i] > var.upper + EPS_FEAS:
            return False
    return True


def solve_lp(prog):
    """Solve a pure LP ConstraintProgram (no binaries, no groups)."""
    if any(v.kind == BINARY for v in prog.variables):
        raise ValueError("solve_lp: program contains binary variables; use solve_mip")
    if prog.exactly_one_groups:
        raise ValueError("solve_lp: program contains exactly-one groups; use solve_mip")
    A, senses, b, c = prog.dense()
    uppers = [v.upper for v in prog.variables]
    status, obj, xv = solve_lp_arrays(A, senses, b, c, prog.sense, uppers)
    if status != "optimal":
        return Solution(status=status)
    if not _verify(prog, xv):
        raise NumericalInstability("solution failed the feasibility recheck")
    return Solution(status="optimal", objective=obj, values=xv,
                    names=tuple(v.name for v in prog.variables))
