"""Flow-network views of the built-in problem families.

The TE view (demand sources over path copies over capacitated link splits)
and the VBP view (ball picks over capacitated bin splits) share their edge
ids between heuristic and benchmark so edge-level comparisons line up.
"""

from ..flow import Copy, FlowNetwork, Pick, Sink, Source, Split
from ..flow import MAXIMIZE, MINIMIZE
from .te import TeAllocation, _path_links
from .vbp import VbpAllocation

TE_MODELS = ("dp", "opt_te")
VBP_MODELS = ("ff", "opt_vbp")


def _path_id(path):
    return "-".join(path)


def demand_node(dem):
    return f"demand:{dem.src}->{dem.dst}"


def link_edge_id(link):
    return f"met:{link.src}->{link.dst}"


def te_network(inst, model="opt_te"):
    net = FlowNetwork()
    net.add_node("unmet", Sink(sense=MINIMIZE), metadata={"role": "unmet"})
    net.add_node("met", Sink(sense=MAXIMIZE), metadata={"role": "met"})
    for link in inst.links:
        nid = f"link:{link.src}->{link.dst}"
        net.add_node(nid, Split(), metadata={"role": "link"})
        net.add_edge(link_edge_id(link), nid, "met", capacity=link.capacity,
                     metadata={"role": "met", "link": link.key})
    for k, dem in enumerate(inst.demands):
        dn = net.add_node(demand_node(dem), Source(Split()),
                          metadata={"role": "demand", "index": str(k)})
        net.add_edge(f"unmet:{dem.key}", dn, "unmet",
                     metadata={"role": "unmet", "demand": dem.key})
        for path in dem.paths:
            pid = f"path:{_path_id(path)}"
            if pid not in net.nodes:
                net.add_node(pid, Copy(), metadata={"role": "path"})
            net.add_edge(f"assign:{dem.key}:{_path_id(path)}", dn, pid,
                         metadata={"role": "assign", "demand": dem.key})
            for u, v in _path_links(path):
                net.add_edge(f"traverse:{_path_id(path)}:{u}->{v}",
                             pid, f"link:{u}->{v}",
                             metadata={"role": "traverse", "link": f"{u}->{v}"})
    for nid in net.node_metadata:
        net.node_metadata[nid]["model"] = model
    return net


def ball_node(i):
    return f"ball:{i}"


def vbp_network(inst, model="ff", n_bins=None):
    if inst.unbounded and n_bins is None:
        raise ValueError("unbounded bin pool: pass n_bins to fix the network size")
    if inst.dim != 1:
        raise ValueError("network view supports single-dimension instances only")
    bins = inst.bin_list(n_bins if inst.unbounded else len(inst.bins))
    net = FlowNetwork()
    net.add_node("occupancy", Sink(), metadata={"role": "occupancy"})
    for j, cap in enumerate(bins):
        net.add_node(f"bin:{j}", Split(), metadata={"role": "bin"})
        net.add_edge(f"occupied:{j}", f"bin:{j}", "occupancy", capacity=cap[0],
                     metadata={"role": "occupied", "bin": str(j)})
    for i in range(inst.n_balls):
        net.add_node(ball_node(i), Source(Pick()),
                     metadata={"role": "ball", "index": str(i)})
        for j in range(len(bins)):
            net.add_edge(f"place:{i}:{j}", ball_node(i), f"bin:{j}",
                         metadata={"role": "place", "ball": str(i), "bin": str(j)})
    for nid in net.node_metadata:
        net.node_metadata[nid]["model"] = model
    return net


def to_flow_network(inst, model, n_bins=None):
    """Fig-style network for a problem instance under the named model."""
    if model in TE_MODELS:
        return te_network(inst, model)
    if model in VBP_MODELS:
        return vbp_network(inst, model, n_bins=n_bins)
    raise ValueError(f"unknown model {model!r}")


def project_allocation(alloc, net, inst):
    """Express an allocation's decisions as flows on `net`'s edges."""
    flows = {e.id: 0.0 for e in net.edges}
    if isinstance(alloc, TeAllocation):
        for k, dem in enumerate(inst.demands):
            routed = 0.0
            for p, path in enumerate(dem.paths):
                f = float(alloc.flows[k][p])
                routed += f
                if f == 0.0:
                    continue
                flows[f"assign:{dem.key}:{_path_id(path)}"] += f
                for u, v in _path_links(path):
                    flows[f"traverse:{_path_id(path)}:{u}->{v}"] += f
                    flows[f"met:{u}->{v}"] += f
            flows[f"unmet:{dem.key}"] = max(0.0, float(alloc.demands[k]) - routed)
        return flows
    if isinstance(alloc, VbpAllocation):
        for i, j in enumerate(alloc.assignment):
            size = inst.sizes[i][0]
            flows[f"place:{i}:{j}"] = size
            flows[f"occupied:{j}"] += size
        return flows
    raise TypeError(f"cannot project {type(alloc).__name__}")
