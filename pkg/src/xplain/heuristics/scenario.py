"""Scenario files: problem instances plus their input-space boxes."""

import json
from dataclasses import dataclass
from importlib import resources

from .gap import dp_gap_fn, ff_gap_fn
from .te import Demand, Link, TeInstance, k_shortest_paths
from .vbp import VbpInstance

BUILTIN = ("fig1a_dp", "ff4", "fig3_ff17")


@dataclass(frozen=True)
class Scenario:
    """A named instance with bounds on its outer inputs.

    For TE scenarios the inputs are the per-demand rates; for VBP they are
    the per-ball sizes. `bounds` is one (lo, hi) pair per input.
    """

    name: str
    kind: str            # "te" | "vbp"
    instance: object     # TeInstance | VbpInstance
    bounds: tuple        # ((lo, hi), ...)

    @property
    def dimension(self):
        return len(self.bounds)

    def labels(self):
        if self.kind == "te":
            return tuple(d.key for d in self.instance.demands)
        return tuple(f"ball{i}" for i in range(self.instance.n_balls))

    def gap_fn(self, mode="absolute"):
        if self.kind == "te":
            return dp_gap_fn(self.instance, mode=mode)
        return ff_gap_fn(self.instance, mode=mode)

    def space(self):
        """The bounds as an analyzer search box, labelled per input."""
        from ..analyzer import InputSpace
        return InputSpace(self.bounds, labels=self.labels())

    @property
    def benchmark_sense(self):
        return "max" if self.kind == "te" else "min"

    def baseline_inputs(self):
        """The scenario's own nominal input vector."""
        if self.kind == "vbp":
            return tuple(s[0] for s in self.instance.sizes)
        return tuple(0.0 for _ in self.bounds)


def scenario_from_dict(doc):
    kind = doc["kind"]
    name = doc.get("name", "scenario")
    if kind == "te":
        nodes = tuple(str(n) for n in doc["nodes"])
        links = tuple(Link(str(l["src"]), str(l["dst"]), float(l["capacity"]))
                      for l in doc["links"])
        k = int(doc.get("k_paths", 4))
        demands = []
        for d in doc["demands"]:
            src, dst = str(d["src"]), str(d["dst"])
            if "paths" in d:
                paths = tuple(tuple(str(n) for n in p) for p in d["paths"])
                shortest = (tuple(str(n) for n in d["shortest"])
                            if "shortest" in d else paths[0])
            else:
                paths = tuple(k_shortest_paths(nodes, links, src, dst, k))
                if not paths:
                    raise ValueError(f"no path from {src} to {dst}")
                shortest = paths[0]
            demands.append(Demand(src, dst, paths, shortest))
        inst = TeInstance(nodes, links, tuple(demands), float(doc["threshold"]))
        default = tuple((0.0, 2.0 * max(l.capacity for l in links))
                        for _ in demands)
    elif kind == "vbp":
        sizes = tuple(doc["sizes"])
        bins = doc.get("bins")
        cap = doc.get("bin_capacity", 1.0)
        if bins is None:
            inst = VbpInstance(sizes, None, cap)
        elif isinstance(bins, int):
            caps = (cap,) if not isinstance(cap, (list, tuple)) else tuple(cap)
            inst = VbpInstance(sizes, tuple(caps for _ in range(bins)))
        else:
            inst = VbpInstance(sizes, tuple(tuple(b) if isinstance(b, (list, tuple))
                                            else (b,) for b in bins))
        default = tuple((0.0, float(max(inst.bin_list(1)[0])))
                        for _ in range(inst.n_balls))
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")

    bounds = doc.get("bounds")
    if bounds is None:
        bounds = default
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    return Scenario(name, kind, inst, bounds)


def scenario_to_dict(sc):
    if sc.kind == "te":
        inst = sc.instance
        return {
            "kind": "te",
            "name": sc.name,
            "nodes": list(inst.nodes),
            "links": [{"src": l.src, "dst": l.dst, "capacity": l.capacity}
                      for l in inst.links],
            "demands": [{"src": d.src, "dst": d.dst,
                         "paths": [list(p) for p in d.paths],
                         "shortest": list(d.shortest)} for d in inst.demands],
            "threshold": inst.threshold,
            "bounds": [list(b) for b in sc.bounds],
        }
    inst = sc.instance
    doc = {
        "kind": "vbp",
        "name": sc.name,
        "sizes": [list(s) if len(s) > 1 else s[0] for s in inst.sizes],
        "bounds": [list(b) for b in sc.bounds],
    }
    if inst.bins is None:
        doc["bins"] = None
        doc["bin_capacity"] = (inst.bin_capacity[0] if len(inst.bin_capacity) == 1
                               else list(inst.bin_capacity))
    else:
        doc["bins"] = [list(b) if len(b) > 1 else b[0] for b in inst.bins]
    return doc


def load_scenario(path):
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(sc, path):
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def builtin(name):
    """One of the bundled scenarios: fig1a_dp, ff4, fig3_ff17."""
    if name not in BUILTIN:
        raise KeyError(f"unknown builtin scenario {name!r}; have {BUILTIN}")
    text = resources.files("xplain.heuristics._data").joinpath(f"{name}.json").read_text()
    return scenario_from_dict(json.loads(text))
