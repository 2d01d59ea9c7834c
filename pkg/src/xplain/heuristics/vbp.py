"""Vector bin packing: first-fit and the exact minimum-bins benchmark."""

from dataclasses import dataclass

import math

import numpy as np


class Unplaceable(Exception):
    """First-fit ran out of bins for a ball (fixed bin count only)."""

    def __init__(self, ball):
        self.ball = ball
        super().__init__(f"ball {ball} fits in no bin")


def _as_vectors(rows, name):
    out = []
    for row in rows:
        vec = (float(row),) if np.isscalar(row) else tuple(float(v) for v in row)
        out.append(vec)
    if out and len({len(v) for v in out}) != 1:
        raise ValueError(f"{name} must share one dimensionality")
    return tuple(out)


@dataclass(frozen=True)
class VbpInstance:
    """Balls to pack, in processing order, plus the bin pool.

    `bins` is an explicit tuple of per-dimension capacities (fixed pool), or
    None for an unbounded pool of identical `bin_capacity` bins.
    """

    sizes: tuple
    bins: tuple | None = None
    bin_capacity: tuple | None = None

    def __post_init__(self):
        sizes = _as_vectors(self.sizes, "sizes")
        object.__setattr__(self, "sizes", sizes)
        dim = len(sizes[0]) if sizes else 1
        if self.bins is not None:
            bins = _as_vectors(self.bins, "bins")
            if bins and sizes and len(bins[0]) != dim:
                raise ValueError("bin dimensionality differs from ball sizes")
            object.__setattr__(self, "bins", bins)
            object.__setattr__(self, "bin_capacity", None)
        else:
            cap = self.bin_capacity if self.bin_capacity is not None else (1.0,) * dim
            cap = (float(cap),) if np.isscalar(cap) else tuple(float(v) for v in cap)
            if sizes and len(cap) != dim:
                raise ValueError("bin dimensionality differs from ball sizes")
            object.__setattr__(self, "bin_capacity", cap)
        for vec in sizes:
            if any(v < 0 for v in vec):
                raise ValueError("ball sizes must be nonnegative")

    @property
    def n_balls(self):
        return len(self.sizes)

    @property
    def dim(self):
        if self.sizes:
            return len(self.sizes[0])
        return len(self.bins[0]) if self.bins else len(self.bin_capacity)

    @property
    def unbounded(self):
        return self.bins is None

    def bin_list(self, count):
        """Concrete bin capacities: the fixed pool, or `count` identical bins."""
        if self.bins is not None:
            return self.bins
        return tuple(self.bin_capacity for _ in range(count))

    def identical_bins(self):
        return self.bins is None or len(set(self.bins)) <= 1

    def with_bins(self, count):
        """Unbounded instance pinned down to a concrete pool of `count` bins."""
        return VbpInstance(self.sizes, self.bin_list(count))

    def replace_sizes(self, sizes):
        if self.bins is not None:
            return VbpInstance(tuple(sizes), self.bins)
        return VbpInstance(tuple(sizes), None, self.bin_capacity)


@dataclass(frozen=True)
class FfTrace:
    """Everything first-fit looked at, per (ball, bin) pair.

    residual[i][j] is what would remain of bin j after placing ball i there
    (capacity minus ball minus earlier placements); fits/not_yet_placed are
    the two conjuncts of the first-fit test and first_fit their AND.
    """

    residual: tuple        # (n_balls, n_bins, dim)
    fits: tuple            # (n_balls, n_bins)
    not_yet_placed: tuple  # (n_balls, n_bins)
    first_fit: tuple       # (n_balls, n_bins)
    assignment: tuple      # ball -> bin index


@dataclass(frozen=True)
class VbpAllocation:
    assignment: tuple  # ball -> bin index
    bins_used: int
    loads: tuple       # per bin, per dimension


def _loads(inst, assignment, n_bins):
    loads = [[0.0] * inst.dim for _ in range(n_bins)]
    for i, j in enumerate(assignment):
        for axis, v in enumerate(inst.sizes[i]):
            loads[j][axis] += v
    return tuple(tuple(row) for row in loads)


def run_ff(inst):
    """First-fit in index order; lowest-index bin whose residual fits, all dims.

    Returns (VbpAllocation, FfTrace). With an unbounded pool a fresh bin is
    opened whenever nothing fits; with a fixed pool Unplaceable is raised.
    """
    fixed = inst.bins is not None
    bins = list(inst.bins) if fixed else []
    used = [[0.0] * inst.dim for _ in bins]
    assignment = []
    residual, fits, not_yet, first = [], [], [], []

    for i, size in enumerate(inst.sizes):
        placed = None
        for j, cap in enumerate(bins):
            r = tuple(cap[d] - size[d] - used[j][d] for d in range(inst.dim))
            ok = all(v >= 0 for v in r)
            free = placed is None
            residual.append((i, j, r))
            fits.append((i, j, ok))
            not_yet.append((i, j, free))
            hit = ok and free
            first.append((i, j, hit))
            if hit:
                placed = j
        if placed is None:
            if fixed:
                raise Unplaceable(i)
            bins.append(inst.bin_capacity)
            used.append([0.0] * inst.dim)
            j = len(bins) - 1
            r = tuple(bins[j][d] - size[d] for d in range(inst.dim))
            if any(v < 0 for v in r):
                raise Unplaceable(i)
            residual.append((i, j, r))
            fits.append((i, j, True))
            not_yet.append((i, j, True))
            first.append((i, j, True))
            placed = j
        for d in range(inst.dim):
            used[placed][d] += size[d]
        assignment.append(placed)

    n_bins = len(bins)
    bins_used = len({j for j in assignment})

    def table(entries, empty):
        grid = [[empty] * n_bins for _ in range(inst.n_balls)]
        for i, j, v in entries:
            grid[i][j] = v
        return tuple(tuple(row) for row in grid)

    trace = FfTrace(
        residual=table(residual, None),
        fits=table(fits, False),
        not_yet_placed=table(not_yet, False),
        first_fit=table(first, False),
        assignment=tuple(assignment),
    )
    alloc = VbpAllocation(tuple(assignment), bins_used, _loads(inst, assignment, n_bins))
    return alloc, trace


def _volume_bound(inst, bins):
    """ceil(total size / bin capacity), best over dimensions (identical bins)."""
    if not inst.sizes:
        return 0
    bound = 1
    cap = bins[0]
    for d in range(inst.dim):
        total = sum(s[d] for s in inst.sizes)
        if cap[d] > 0:
            bound = max(bound, math.ceil(total / cap[d] - 1e-9))
    return bound


def optimal_vbp(inst, node_limit=None):
    """Exact minimum number of bins, via the assignment MILP.

    The candidate pool is first-fit's own bin count (an upper bound), or the
    fixed pool when one is configured.
    """
    from ..solver import BINARY, EQ, LE, ConstraintProgram, solve_mip

    if inst.n_balls == 0:
        return VbpAllocation((), 0, ())
    ff_alloc, _ = run_ff(inst)
    n_bins = len(inst.bins) if inst.bins is not None else ff_alloc.bins_used
    bins = inst.bin_list(n_bins)
    symmetric = inst.identical_bins()

    # internally process large balls first; tightens the j <= i restriction
    order = sorted(range(inst.n_balls),
                   key=lambda i: (tuple(-v for v in inst.sizes[i]), i))
    sizes = [inst.sizes[i] for i in order]

    prog = ConstraintProgram(sense="min")
    x = {}
    for i in range(len(sizes)):
        top = min(i, n_bins - 1) if symmetric else n_bins - 1
        for j in range(top + 1):
            x[(i, j)] = prog.add_variable(f"x:{i}:{j}", upper=1.0)
    z = [prog.add_variable(f"z:{j}", kind=BINARY) for j in range(n_bins)]

    for i in range(len(sizes)):
        members = [x[(i, j)] for j in range(n_bins) if (i, j) in x]
        prog.add_constraint({idx: 1.0 for idx in members}, EQ, 1.0)
        prog.add_group(members)
        for j in range(n_bins):
            if (i, j) in x:
                prog.add_constraint({x[(i, j)]: 1.0, z[j]: -1.0}, LE, 0.0)
    for j in range(n_bins):
        for d in range(inst.dim):
            coeffs = {x[(i, j)]: sizes[i][d]
                      for i in range(len(sizes)) if (i, j) in x and sizes[i][d] != 0.0}
            coeffs[z[j]] = coeffs.get(z[j], 0.0) - bins[j][d]
            prog.add_constraint(coeffs, LE, 0.0)
    if symmetric:
        for j in range(n_bins - 1):
            prog.add_constraint({z[j]: -1.0, z[j + 1]: 1.0}, LE, 0.0)
        bound = _volume_bound(inst, bins)
        if bound > 0:
            prog.add_constraint({idx: -1.0 for idx in z}, LE, -float(bound))
    prog.set_objective({idx: 1.0 for idx in z}, "min")

    kwargs = {} if node_limit is None else {"node_limit": node_limit}
    sol = solve_mip(prog, integral_objective=True, **kwargs)
    if sol.status != "optimal":
        raise Unplaceable(-1)

    assignment = [0] * inst.n_balls
    for (i, j), idx in x.items():
        if sol.values[idx] > 0.5:
            assignment[order[i]] = j
    bins_used = int(round(sol.objective))
    return VbpAllocation(tuple(assignment), bins_used,
                         _loads(inst, assignment, n_bins))
