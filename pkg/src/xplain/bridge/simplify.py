"""Equality-substitution presolve for ConstraintPrograms.

Eliminates variables pinned by equality chains (the AllEqual / Multiply /
Copy rows the compiler emits) via union-find with multipliers: each variable
is expressed as mult * root, roots may be pinned to constants. Binaries and
exactly-one group members are never eliminated. The optimal value is
preserved exactly; a variable mapping is retained so solutions on the reduced
program expand back onto the original variable set.
"""

from dataclasses import dataclass

import numpy as np

from ..solver import BINARY, EQ, LE, ConstraintProgram

_ZERO = 1e-12
_PIN_TOL = 1e-9


@dataclass
class SimplifiedProgram:
    program: ConstraintProgram
    objective_offset: float
    _parent: list
    _mult: list
    _pinned: dict          # root -> value
    _new_index: dict       # root -> column in reduced program
    _n_original: int

    def expand(self, reduced_values):
        """Map a reduced-program solution vector back to the original variables."""
        out = np.zeros(self._n_original)
        for i in range(self._n_original):
            r, m = _find(self._parent, self._mult, i)
            if r in self._pinned:
                base = self._pinned[r]
            elif r in self._new_index:
                base = float(reduced_values[self._new_index[r]])
            else:
                base = 0.0  # dropped free variable
            out[i] = m * base
        return out


def _find(parent, mult, i):
    if parent[i] == i:
        return i, 1.0
    r, m = _find(parent, mult, parent[i])
    parent[i] = r
    mult[i] = mult[i] * m
    return r, mult[i]


def _resolve(parent, mult, pinned, coeffs, rhs):
    """Rewrite a sparse row over current roots, folding pinned roots into rhs."""
    acc = {}
    for i, c in coeffs:
        r, m = _find(parent, mult, i)
        if r in pinned:
            rhs -= c * m * pinned[r]
        else:
            acc[r] = acc.get(r, 0.0) + c * m
    items = [(r, c) for r, c in sorted(acc.items()) if abs(c) > _ZERO]
    return items, rhs


def simplify(prog):
    """Return a SimplifiedProgram preserving the optimal value exactly."""
    n = prog.n_vars
    parent = list(range(n))
    mult = [1.0] * n
    pinned = {}
    protected = set(prog.binary_indices())
    for g in prog.exactly_one_groups:
        protected.update(g)

    markers = []           # irreducibly contradictory rows
    final_rows = []        # (items, sense, rhs) frozen equality rows
    pending = [(list(c.coeffs), c.rhs) for c in prog.constraints if c.sense == EQ]
    le_rows = [(list(c.coeffs), c.rhs) for c in prog.constraints if c.sense == LE]

    def pin(root, value):
        if root in pinned:
            if abs(pinned[root] - value) > _PIN_TOL:
                markers.append(((), EQ, 1.0))  # 0 == 1, infeasible
            return
        if value < -_PIN_TOL:
            markers.append(((), EQ, 1.0))
            return
        pinned[root] = max(value, 0.0)

    changed = True
    while changed:
        changed = False
        still = []
        for coeffs, rhs in pending:
            items, r = _resolve(parent, mult, pinned, coeffs, rhs)
            if len(items) == 0:
                if abs(r) > _PIN_TOL:
                    markers.append(((), EQ, r))
                changed = True
                continue
            if len(items) == 1:
                (root, a), = items
                if root in protected:
                    final_rows.append((items, EQ, r))
                else:
                    pin(root, r / a)
                changed = True
                continue
            if len(items) == 2 and abs(r) <= _PIN_TOL:
                (r1, a), (r2, b) = items
                p1, p2 = r1 in protected, r2 in protected
                if p1 and p2:
                    final_rows.append((items, EQ, 0.0))
                    changed = True
                    continue
                # a*r1 + b*r2 = 0  ->  elim = m * keeper
                if p1 or (not p2 and r1 < r2):
                    keeper, elim, m = r1, r2, -a / b
                else:
                    keeper, elim, m = r2, r1, -b / a
                if m < 0:
                    # nonnegative variables tied with a negative factor: both zero
                    for root in (r1, r2):
                        if root in protected:
                            final_rows.append(([(root, 1.0)], EQ, 0.0))
                        else:
                            pin(root, 0.0)
                else:
                    parent[elim] = keeper
                    mult[elim] = m
                changed = True
                continue
            still.append((coeffs, rhs))
        pending = still

    # rewrite everything that survives over the final root structure
    rewritten = []
    for coeffs, rhs in pending:
        items, r = _resolve(parent, mult, pinned, coeffs, rhs)
        if not items:
            if abs(r) > _PIN_TOL:
                markers.append(((), EQ, r))
            continue
        rewritten.append((items, EQ, r))
    rewritten.extend(final_rows)
    for coeffs, rhs in le_rows:
        items, r = _resolve(parent, mult, pinned, coeffs, rhs)
        if not items:
            if r < -_PIN_TOL:
                markers.append(((), LE, r))
            continue
        rewritten.append((items, LE, r))
    rewritten.extend(markers)

    obj_items, neg_offset = _resolve(parent, mult, pinned, list(prog.objective.items()), 0.0)
    objective_offset = -neg_offset  # constants folded out of the objective

    # upper bounds migrate to roots; pinned values are checked against them
    root_upper = {}
    for i, var in enumerate(prog.variables):
        r, m = _find(parent, mult, i)
        if r in pinned:
            value = m * pinned[r]
            if var.upper is not None and value > var.upper + _PIN_TOL:
                rewritten.append(((), LE, -1.0))
            if value < -_PIN_TOL:
                rewritten.append(((), LE, -1.0))
            continue
        if var.upper is not None and m > 0:
            cap = var.upper / m
            if r not in root_upper or cap < root_upper[r]:
                root_upper[r] = cap

    used = set()
    for items, _sense, _rhs in rewritten:
        used.update(r for r, _c in items)
    used.update(r for r, _c in obj_items)
    for i in protected:
        r, _m = _find(parent, mult, i)
        if r not in pinned:
            used.add(r)

    roots = sorted(
        r for r in range(n)
        if parent[r] == r and r not in pinned and r in used
    )
    new_index = {r: k for k, r in enumerate(roots)}

    reduced = ConstraintProgram()
    for r in roots:
        var = prog.variables[r]
        upper = root_upper.get(r, var.upper if parent[r] == r else None)
        reduced.add_variable(var.name, var.kind, upper)
    for items, sense, rhs in rewritten:
        reduced.add_constraint({new_index[r]: c for r, c in items}, sense, rhs)
    reduced.exactly_one_groups = [
        tuple(new_index[_find(parent, mult, m_)[0]] for m_ in g)
        for g in prog.exactly_one_groups
    ]
    reduced.set_objective({new_index[r]: c for r, c in obj_items}, prog.sense)

    return SimplifiedProgram(
        program=reduced,
        objective_offset=objective_offset,
        _parent=parent,
        _mult=mult,
        _pinned=pinned,
        _new_index=new_index,
        _n_original=n,
    )
