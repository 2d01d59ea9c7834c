"""Network-flow DSL: behavior-typed nodes, capacity/fixed-rate edges.

A FlowNetwork is a directed graph whose nodes impose constraints on the flows
of their incident edges:

- Split: flow conservation, optional per-outgoing-edge capacities, optional
  fixed incoming rates.
- Pick: conservation plus "at most one outgoing edge carries flow".
- Multiply: single in, single out, f_out = factor * f_in.
- AllEqual: every incident flow takes the same value (no conservation).
- Copy: each outgoing flow equals the total incoming flow.
- Source: an input to the problem; behaves like its inner Split or Pick with
  the externally supplied input value as its total outflow. Sources without a
  supplied value are free supplies.
- Sink: absorbs flow; one sink may be designated as the objective, in which
  case its total inflow is maximized or minimized per its sense.

Evaluation compiles the network to a constraint program and solves it, so a
network is simultaneously a model and an executable optimization.
"""

import json
from dataclasses import dataclass, field

from ._validation import check_scalar

EPS_FEAS = 1e-6
EPS_FLOW = 1e-9

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


class FlowError(Exception):
    pass


class Infeasible(FlowError):
    """No flow assignment satisfies the network's constraints."""


class Unbounded(FlowError):
    """The objective can be improved without limit."""


@dataclass(frozen=True)
class Split:
    outgoing_capacities: tuple = ()   # ((edge id, capacity), ...)
    fixed_incoming: tuple = ()        # ((edge id, rate), ...)

    def __post_init__(self):
        for label, pairs in (("capacity", self.outgoing_capacities),
                             ("fixed rate", self.fixed_incoming)):
            for eid, value in pairs:
                check_scalar(value, f"split {label} for edge {eid!r}", low=0.0)


@dataclass(frozen=True)
class Pick:
    pass


@dataclass(frozen=True)
class Multiply:
    factor: float

    def __post_init__(self):
        check_scalar(self.factor, "multiply factor", low=0.0, inclusive_low=False)


@dataclass(frozen=True)
class AllEqual:
    pass


@dataclass(frozen=True)
class Copy:
    pass


@dataclass(frozen=True)
class Source:
    inner: object = field(default_factory=Split)

    def __post_init__(self):
        if not isinstance(self.inner, (Split, Pick)):
            raise TypeError("source inner behavior must be Split or Pick")


@dataclass(frozen=True)
class Sink:
    sense: str = MAXIMIZE

    def __post_init__(self):
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise ValueError(f"sink sense must be maximize or minimize, got {self.sense!r}")


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    capacity: float | None = None
    fixed_rate: float | None = None
    metadata: tuple = ()

    def __post_init__(self):
        if self.capacity is not None:
            check_scalar(self.capacity, f"edge {self.id!r} capacity", low=0.0)
        if self.fixed_rate is not None:
            check_scalar(self.fixed_rate, f"edge {self.id!r} fixed_rate", low=0.0)

    def meta(self):
        return dict(self.metadata)


def _as_meta(mapping):
    if not mapping:
        return ()
    if isinstance(mapping, tuple):
        return mapping
    return tuple(sorted((str(k), str(v)) for k, v in mapping.items()))


def edge(id, tail, head, capacity=None, fixed_rate=None, metadata=None):
    """Edge constructor accepting a plain dict for metadata."""
    return Edge(id, tail, head, capacity, fixed_rate, _as_meta(metadata))


@dataclass
class FlowNetwork:
    nodes: dict = field(default_factory=dict)       # id -> behavior
    edges: list = field(default_factory=list)       # list[Edge]
    node_metadata: dict = field(default_factory=dict)

    # networks are treated as immutable once built; helpers below recompute
    # adjacency on demand because desk-scale graphs are tiny

    def out_edges(self, node_id):
        return [e for e in self.edges if e.tail == node_id]

    def in_edges(self, node_id):
        return [e for e in self.edges if e.head == node_id]

    def edge_by_id(self, eid):
        for e in self.edges:
            if e.id == eid:
                return e
        raise KeyError(eid)

    def add_node(self, node_id, behavior, metadata=None):
        if node_id in self.nodes:
            raise ValueError(f"duplicate node id {node_id!r}")
        self.nodes[node_id] = behavior
        if metadata:
            self.node_metadata[node_id] = {str(k): str(v) for k, v in metadata.items()}
        return node_id

    def add_edge(self, id, tail, head, capacity=None, fixed_rate=None, metadata=None):
        self.edges.append(edge(id, tail, head, capacity, fixed_rate, metadata))
        return id


def validate(net):
    """Structural check; returns a list of human-readable violations."""
    issues = []
    seen = set()
    for e in net.edges:
        if e.id in seen:
            issues.append(f"edge {e.id!r}: duplicate edge id")
        seen.add(e.id)
        if e.tail == e.head:
            issues.append(f"edge {e.id!r}: self-loop {e.tail!r}")
        for endpoint in (e.tail, e.head):
            if endpoint not in net.nodes:
                issues.append(f"edge {e.id!r}: unknown node {endpoint!r}")

    for nid, beh in net.nodes.items():
        outs = net.out_edges(nid)
        ins = net.in_edges(nid)
        if isinstance(beh, Multiply):
            if len(ins) != 1 or len(outs) != 1:
                issues.append(
                    f"node {nid!r}: multiply arity must be 1 in / 1 out, "
                    f"got {len(ins)} in / {len(outs)} out"
                )
        elif isinstance(beh, Sink):
            if outs:
                issues.append(f"node {nid!r}: sink has outgoing edges")
        elif isinstance(beh, Source):
            for e in ins:
                if e.fixed_rate is None:
                    issues.append(
                        f"node {nid!r}: source has non-constant incoming edge {e.id!r}"
                    )
            if isinstance(beh.inner, Pick) and not outs:
                issues.append(f"node {nid!r}: pick requires at least one outgoing edge")
            if isinstance(beh.inner, Split):
                issues.extend(_check_split_params(nid, beh.inner, ins, outs))
        elif isinstance(beh, Pick):
            if not outs:
                issues.append(f"node {nid!r}: pick requires at least one outgoing edge")
        elif isinstance(beh, Split):
            issues.extend(_check_split_params(nid, beh, ins, outs))
        elif isinstance(beh, (AllEqual, Copy)):
            pass
        else:
            issues.append(f"node {nid!r}: unknown behavior {type(beh).__name__}")
    return issues


def _check_split_params(nid, split, ins, outs):
    issues = []
    out_ids = {e.id for e in outs}
    in_ids = {e.id for e in ins}
    for eid, _cap in split.outgoing_capacities:
        if eid not in out_ids:
            issues.append(f"node {nid!r}: capacity names non-outgoing edge {eid!r}")
    for eid, _rate in split.fixed_incoming:
        if eid not in in_ids:
            issues.append(f"node {nid!r}: fixed rate names non-incoming edge {eid!r}")
    return issues


def assignment_violations(net, assignment, eps=EPS_FEAS):
    """Check a FlowAssignment (edge id -> flow) against every node behavior."""
    issues = []
    flow = {e.id: float(assignment.get(e.id, 0.0)) for e in net.edges}
    for eid, f in flow.items():
        if f < -eps:
            issues.append(f"edge {eid!r}: negative flow {f}")
    for e in net.edges:
        cap = effective_capacity(net, e)
        if cap is not None and flow[e.id] > cap + eps:
            issues.append(f"edge {e.id!r}: flow {flow[e.id]} exceeds capacity {cap}")
        rate = effective_fixed_rate(net, e)
        if rate is not None and abs(flow[e.id] - rate) > eps:
            issues.append(f"edge {e.id!r}: flow {flow[e.id]} != fixed rate {rate}")
    for nid, beh in net.nodes.items():
        ins = sum(flow[e.id] for e in net.in_edges(nid))
        outs_edges = net.out_edges(nid)
        outs = sum(flow[e.id] for e in outs_edges)
        if isinstance(beh, Source):
            beh = beh.inner
            if isinstance(beh, Pick):
                positive = [e.id for e in outs_edges if flow[e.id] > EPS_FLOW]
                if len(positive) > 1:
                    issues.append(f"node {nid!r}: pick sends flow on {positive}")
            continue  # conservation at sources is driven by the input value
        if isinstance(beh, Split):
            if abs(ins - outs) > eps:
                issues.append(f"node {nid!r}: split conservation off by {ins - outs}")
        elif isinstance(beh, Pick):
            if abs(ins - outs) > eps:
                issues.append(f"node {nid!r}: pick conservation off by {ins - outs}")
            positive = [e.id for e in outs_edges if flow[e.id] > EPS_FLOW]
            if len(positive) > 1:
                issues.append(f"node {nid!r}: pick sends flow on {positive}")
        elif isinstance(beh, Multiply):
            if len(net.in_edges(nid)) == 1 and len(outs_edges) == 1:
                got = flow[outs_edges[0].id]
                want = beh.factor * ins
                if abs(got - want) > eps:
                    issues.append(f"node {nid!r}: multiply output {got} != {want}")
        elif isinstance(beh, AllEqual):
            incident = [flow[e.id] for e in net.in_edges(nid)] + \
                       [flow[e.id] for e in outs_edges]
            if incident and max(incident) - min(incident) > eps:
                issues.append(f"node {nid!r}: all-equal flows spread "
                              f"{max(incident) - min(incident)}")
        elif isinstance(beh, Copy):
            for e in outs_edges:
                if abs(flow[e.id] - ins) > eps:
                    issues.append(f"node {nid!r}: copy edge {e.id!r} flow "
                                  f"{flow[e.id]} != total in {ins}")
    return issues


def effective_capacity(net, e):
    """Edge capacity combined with the tail split's per-edge capacity."""
    caps = []
    if e.capacity is not None:
        caps.append(e.capacity)
    beh = net.nodes.get(e.tail)
    if isinstance(beh, Source):
        beh = beh.inner
    if isinstance(beh, Split):
        for eid, cap in beh.outgoing_capacities:
            if eid == e.id:
                caps.append(cap)
    return min(caps) if caps else None


def effective_fixed_rate(net, e):
    rates = []
    if e.fixed_rate is not None:
        rates.append(e.fixed_rate)
    beh = net.nodes.get(e.head)
    if isinstance(beh, Source):
        beh = beh.inner
    if isinstance(beh, Split):
        for eid, rate in beh.fixed_incoming:
            if eid == e.id:
                rates.append(rate)
    if not rates:
        return None
    if len(set(rates)) > 1:
        raise FlowError(f"edge {e.id!r}: conflicting fixed rates {rates}")
    return rates[0]


def evaluate(net, inputs, objective_sink):
    """Optimize the designated sink's inflow under the given source inputs.

    Returns (objective value, FlowAssignment). Sources absent from `inputs`
    are free supplies. Raises Infeasible / Unbounded.
    """
    problems = validate(net)
    if problems:
        raise FlowError("invalid network: " + "; ".join(problems))
    if objective_sink not in net.nodes or not isinstance(net.nodes[objective_sink], Sink):
        raise FlowError(f"objective sink {objective_sink!r} is not a Sink node")
    for src in inputs:
        if src not in net.nodes or not isinstance(net.nodes[src], Source):
            raise FlowError(f"input target {src!r} is not a Source node")

    from .bridge import compile_network, simplify
    from .solver import solve_mip

    prog = compile_network(net, objective_sink, inputs=inputs)
    simp = simplify(prog)
    sol = solve_mip(simp.program)
    if sol.status == "infeasible":
        raise Infeasible("no feasible flow assignment")
    if sol.status == "unbounded":
        raise Unbounded("objective unbounded")
    values = simp.expand(sol.values)
    assignment = {e.id: float(values[i]) for i, e in enumerate(net.edges)}
    objective = sol.objective + simp.objective_offset
    return float(objective), assignment


# --- JSON serialization ----------------------------------------------------

_BEHAVIOR_NAMES = {
    Split: "split", Pick: "pick", Multiply: "multiply", AllEqual: "all_equal",
    Copy: "copy", Source: "source", Sink: "sink",
}


def _behavior_to_dict(beh):
    d = {"behavior": _BEHAVIOR_NAMES[type(beh)]}
    if isinstance(beh, Split):
        if beh.outgoing_capacities:
            d["outgoing_capacities"] = {k: v for k, v in beh.outgoing_capacities}
        if beh.fixed_incoming:
            d["fixed_incoming"] = {k: v for k, v in beh.fixed_incoming}
    elif isinstance(beh, Multiply):
        d["factor"] = beh.factor
    elif isinstance(beh, Source):
        inner = _behavior_to_dict(beh.inner)
        inner.pop("behavior")
        d["inner"] = _BEHAVIOR_NAMES[type(beh.inner)]
        d.update(inner)
    elif isinstance(beh, Sink):
        d["sense"] = beh.sense
    return d


def _behavior_from_dict(d):
    kind = d["behavior"]
    if kind == "split":
        return Split(
            tuple(sorted((k, float(v)) for k, v in d.get("outgoing_capacities", {}).items())),
            tuple(sorted((k, float(v)) for k, v in d.get("fixed_incoming", {}).items())),
        )
    if kind == "pick":
        return Pick()
    if kind == "multiply":
        return Multiply(float(d["factor"]))
    if kind == "all_equal":
        return AllEqual()
    if kind == "copy":
        return Copy()
    if kind == "source":
        inner_kind = d.get("inner", "split")
        if inner_kind == "pick":
            return Source(Pick())
        return Source(Split(
            tuple(sorted((k, float(v)) for k, v in d.get("outgoing_capacities", {}).items())),
            tuple(sorted((k, float(v)) for k, v in d.get("fixed_incoming", {}).items())),
        ))
    if kind == "sink":
        return Sink(d.get("sense", MAXIMIZE))
    raise ValueError(f"unknown behavior {kind!r}")


def network_to_dict(net):
    nodes = []
    for nid, beh in net.nodes.items():
        entry = {"id": nid}
        entry.update(_behavior_to_dict(beh))
        meta = net.node_metadata.get(nid)
        if meta:
            entry["metadata"] = dict(meta)
        nodes.append(entry)
    edges = []
    for e in net.edges:
        entry = {"id": e.id, "from": e.tail, "to": e.head}
        if e.capacity is not None:
            entry["capacity"] = e.capacity
        if e.fixed_rate is not None:
            entry["fixed_rate"] = e.fixed_rate
        if e.metadata:
            entry["metadata"] = dict(e.metadata)
        edges.append(entry)
    return {"nodes": nodes, "edges": edges}


def network_from_dict(doc):
    net = FlowNetwork()
    for entry in doc["nodes"]:
        beh = _behavior_from_dict(entry)
        net.add_node(entry["id"], beh, entry.get("metadata"))
    for entry in doc["edges"]:
        net.add_edge(
            entry["id"], entry["from"], entry["to"],
            capacity=entry.get("capacity"),
            fixed_rate=entry.get("fixed_rate"),
            metadata=entry.get("metadata"),
        )
    return net


def to_json(net, indent=2):
    return json.dumps(network_to_dict(net), indent=indent, sort_keys=False)


def from_json(text):
    return network_from_dict(json.loads(text))
