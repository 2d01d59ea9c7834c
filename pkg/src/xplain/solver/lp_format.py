"""Text export of a ConstraintProgram in the common LP file format.

Debug aid only: lets a program be fed to an external solver by hand. Covers
the subset we generate (linear objective, <=/= rows, bounds, binaries).
Exactly-one groups have no LP-format equivalent and are emitted as comments.
"""

from .program import BINARY, EQ, MAXIMIZE


def _term(coef, name, first):
    sign = "-" if coef < 0 else ("" if first else "+")
    mag = abs(coef)
    return f"{sign} {mag:g} {name}".strip() if not first else f"{sign}{mag:g} {name}"


def _expr(items, names):
    parts = []
    for k, (idx, coef) in enumerate(items):
        parts.append(_term(coef, names[idx], first=(k == 0)))
    return " ".join(parts) if parts else "0 " + (names[0] if names else "x0")


def to_lp_format(prog):
    names = [v.name.replace(" ", "_") for v in prog.variables]
    lines = []
    lines.append("Maximize" if prog.sense == MAXIMIZE else "Minimize")
    obj_items = sorted(prog.objective.items())
    lines.append(" obj: " + _expr(obj_items, names))
    lines.append("Subject To")
    for r, con in enumerate(prog.constraints):
        op = "=" if con.sense == EQ else "<="
        lines.append(f" c{r}: " + _expr(list(con.coeffs), names) + f" {op} {con.rhs:g}")
    bounds = []
    for i, v in enumerate(prog.variables):
        if v.kind != BINARY and v.upper is not None:
            bounds.append(f" 0 <= {names[i]} <= {v.upper:g}")
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    bins = [names[i] for i in prog.binary_indices()]
    if bins:
        lines.append("Binary")
        lines.append(" " + " ".join(bins))
    for g, members in enumerate(prog.exactly_one_groups):
        lines.append(f"\\ exactly-one group {g}: " + " ".join(names[i] for i in members))
    lines.append("End")
    return "\n".join(lines) + "\n"
