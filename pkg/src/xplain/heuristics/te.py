"""Traffic engineering: demand pinning heuristic and the max-flow benchmark.

The pinning heuristic routes every demand at or below a threshold onto its
designated shortest path (clamped to residual capacity), then solves a
path-based max-flow over what remains. The benchmark solves the same
path-based max-flow without pinning anything.
"""

from dataclasses import dataclass

import numpy as np

from .._validation import check_array_1d, check_scalar


@dataclass(frozen=True)
class Link:
    src: str
    dst: str
    capacity: float

    def __post_init__(self):
        check_scalar(self.capacity, f"capacity of {self.src}->{self.dst}",
                     low=0.0, inclusive_low=False)

    @property
    def key(self):
        return f"{self.src}->{self.dst}"


@dataclass(frozen=True)
class Demand:
    src: str
    dst: str
    paths: tuple      # tuple of node-sequence tuples
    shortest: tuple   # the pinning target, one of `paths`

    @property
    def key(self):
        return f"{self.src}->{self.dst}"


def _path_links(path):
    return list(zip(path, path[1:]))


@dataclass(frozen=True)
class TeInstance:
    nodes: tuple
    links: tuple      # tuple[Link]
    demands: tuple    # tuple[Demand]
    threshold: float

    def __post_init__(self):
        check_scalar(self.threshold, "pinning threshold", low=0.0)
        by_pair = {(l.src, l.dst) for l in self.links}
        for dem in self.demands:
            if dem.shortest not in dem.paths:
                raise ValueError(
                    f"demand {dem.key}: shortest path not among its paths")
            for path in dem.paths:
                if path[0] != dem.src or path[-1] != dem.dst:
                    raise ValueError(
                        f"demand {dem.key}: path {path} has wrong endpoints")
                for hop in _path_links(path):
                    if hop not in by_pair:
                        raise ValueError(
                            f"demand {dem.key}: path uses missing link {hop}")

    @property
    def n_demands(self):
        return len(self.demands)

    def capacities(self):
        return {l.key: l.capacity for l in self.links}


def all_simple_paths(nodes, links, src, dst):
    """Every simple directed path src -> dst, as node tuples."""
    adjacency = {}
    for l in links:
        adjacency.setdefault(l.src, []).append(l.dst)
    for nbrs in adjacency.values():
        nbrs.sort()
    found = []

    def walk(node, seen, trail):
        if node == dst:
            found.append(tuple(trail))
            return
        for nxt in adjacency.get(node, []):
            if nxt not in seen:
                walk(nxt, seen | {nxt}, trail + [nxt])

    walk(src, {src}, [src])
    return found


def k_shortest_paths(nodes, links, src, dst, k=4):
    """The k hop-shortest simple paths, ties broken lexicographically."""
    paths = all_simple_paths(nodes, links, src, dst)
    paths.sort(key=lambda p: (len(p), p))
    return paths[:k]


def make_instance(nodes, links, demand_pairs, threshold, k=4):
    """Build a TeInstance, generating each demand's k shortest paths."""
    links = tuple(Link(*l) if not isinstance(l, Link) else l for l in links)
    demands = []
    for src, dst in demand_pairs:
        paths = k_shortest_paths(nodes, links, src, dst, k)
        if not paths:
            raise ValueError(f"no path from {src} to {dst}")
        demands.append(Demand(src, dst, tuple(paths), paths[0]))
    return TeInstance(tuple(nodes), links, tuple(demands), float(threshold))


@dataclass(frozen=True)
class TeAllocation:
    """Per-demand, per-path flows plus the usual aggregates."""

    demands: tuple    # requested rates, aligned with TeInstance.demands
    flows: tuple      # per demand: tuple of per-path flows
    total: float

    def routed(self, k):
        return float(sum(self.flows[k]))

    def unmet(self, k):
        return float(self.demands[k]) - self.routed(k)

    @property
    def total_unmet(self):
        return float(sum(self.demands)) - self.total


def _max_flow(inst, d, residual, skip):
    """Path-based max flow over residual capacities, skipping pinned demands.

    Returns per-demand per-path flows (zeros for skipped demands).
    """
    from ..solver import LE, ConstraintProgram, solve_lp

    prog = ConstraintProgram(sense="max")
    var = {}
    for k, dem in enumerate(inst.demands):
        if k in skip:
            continue
        for p, _path in enumerate(dem.paths):
            var[(k, p)] = prog.add_variable(f"f:{k}:{p}")
    objective = {idx: 1.0 for idx in var.values()}

    for k, dem in enumerate(inst.demands):
        if k in skip:
            continue
        prog.add_constraint({var[(k, p)]: 1.0 for p in range(len(dem.paths))},
                            LE, float(d[k]))
    for link in inst.links:
        hop = (link.src, link.dst)
        coeffs = {}
        for (k, p), idx in var.items():
            if hop in _path_links(inst.demands[k].paths[p]):
                coeffs[idx] = 1.0
        if coeffs:
            prog.add_constraint(coeffs, LE, residual[link.key])
    prog.set_objective(objective, "max")
    sol = solve_lp(prog)

    flows = [[0.0] * len(dem.paths) for dem in inst.demands]
    for (k, p), idx in var.items():
        flows[k][p] = max(0.0, float(sol.values[idx]))
    return flows


def run_dp(inst, d):
    """Demand pinning: pin small demands to their shortest paths, then max-flow."""
    d = check_array_1d(np.asarray(d, dtype=float), "demands")
    if len(d) != inst.n_demands:
        raise ValueError(f"expected {inst.n_demands} demand values, got {len(d)}")
    if np.any(d < 0):
        raise ValueError("demands must be nonnegative")

    residual = inst.capacities()
    flows = [[0.0] * len(dem.paths) for dem in inst.demands]
    pinned = set()
    for k, dem in enumerate(inst.demands):
        if d[k] > inst.threshold:
            continue
        pinned.add(k)
        hops = _path_links(dem.shortest)
        room = min(residual[f"{u}->{v}"] for u, v in hops)
        rate = min(float(d[k]), room)
        flows[k][dem.paths.index(dem.shortest)] = rate
        for u, v in hops:
            residual[f"{u}->{v}"] -= rate

    rest = _max_flow(inst, d, residual, pinned)
    for k in range(inst.n_demands):
        if k not in pinned:
            flows[k] = rest[k]
    flows = tuple(tuple(row) for row in flows)
    total = float(sum(sum(row) for row in flows))
    return TeAllocation(tuple(float(v) for v in d), flows, total)


def optimal_te(inst, d):
    """Benchmark: path-based multicommodity max flow, no pinning."""
    d = check_array_1d(np.asarray(d, dtype=float), "demands")
    if len(d) != inst.n_demands:
        raise ValueError(f"expected {inst.n_demands} demand values, got {len(d)}")
    if np.any(d < 0):
        raise ValueError("demands must be nonnegative")
    flows = _max_flow(inst, d, inst.capacities(), skip=set())
    flows = tuple(tuple(row) for row in flows)
    total = float(sum(sum(row) for row in flows))
    return TeAllocation(tuple(float(v) for v in d), flows, total)
