"""Subspace files: the printed polytope form, row-major with labels."""

import json

from ..analyzer import AdversarialPoint
from ..stats import SignificanceReport
from .generate import Subspace

__all__ = [
    "load_subspaces",
    "save_subspaces",
    "subspace_from_dict",
    "subspace_to_dict",
]


def subspace_to_dict(sub):
    doc = {
        "labels": list(sub.labels) if sub.labels is not None else None,
        "A": [list(row) for row in sub.A],
        "C": list(sub.C),
        "T": [list(row) for row in sub.T],
        "V": list(sub.V),
        "seed": None,
        "stats": dict(sub.stats) if sub.stats is not None else None,
        "significance": None,
    }
    if sub.seed is not None:
        doc["seed"] = {
            "x": list(sub.seed.x),
            "gap": sub.seed.gap,
            "strategy": sub.seed.strategy,
            "evaluations": sub.seed.evaluations,
        }
    if sub.report is not None:
        r = sub.report
        doc["significance"] = {
            "n": r.n, "W": r.W, "p": r.p, "method": r.method,
            "keep": r.keep, "alpha": r.alpha,
        }
    return doc


def subspace_from_dict(doc):
    seed = None
    if doc.get("seed") is not None:
        s = doc["seed"]
        seed = AdversarialPoint(x=tuple(float(v) for v in s["x"]),
                                gap=float(s["gap"]),
                                strategy=str(s["strategy"]),
                                evaluations=int(s["evaluations"]))
    report = None
    if doc.get("significance") is not None:
        r = doc["significance"]
        report = SignificanceReport(n=int(r["n"]), W=float(r["W"]),
                                    p=float(r["p"]), method=str(r["method"]),
                                    keep=bool(r["keep"]),
                                    alpha=float(r["alpha"]))
    return Subspace(A=doc["A"], C=doc["C"], T=doc.get("T", ()),
                    V=doc.get("V", ()), labels=doc.get("labels"),
                    seed=seed, stats=doc.get("stats"), report=report)


def save_subspaces(path, subspaces):
    doc = {"subspaces": [subspace_to_dict(s) for s in subspaces]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_subspaces(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [subspace_from_dict(d) for d in doc["subspaces"]]
