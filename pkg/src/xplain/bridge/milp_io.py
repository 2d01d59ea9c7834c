"""JSON load/save for the dense Milp container."""

import json

import numpy as np

from .encode import Milp


def milp_to_dict(milp):
    return {
        "sense": milp.sense,
        "c_x": milp.c_x.tolist(),
        "c_y": milp.c_y.tolist(),
        "A_x": milp.A_x.tolist(),
        "A_y": milp.A_y.tolist(),
        "b": milp.b.tolist(),
        "row_sense": list(milp.row_sense),
    }


def milp_from_dict(data):
    m = len(data["b"])
    nx = len(data["c_x"])
    ny = len(data["c_y"])
    return Milp(
        np.asarray(data["c_x"], dtype=float),
        np.asarray(data["c_y"], dtype=float),
        np.asarray(data["A_x"], dtype=float).reshape(m, nx),
        np.asarray(data["A_y"], dtype=float).reshape(m, ny),
        np.asarray(data["b"], dtype=float),
        list(data["row_sense"]),
        data.get("sense", "max"),
    )


def save_milp(milp, path):
    with open(path, "w") as fh:
        json.dump(milp_to_dict(milp), fh, indent=2)
        fh.write("\n")


def load_milp(path):
    with open(path) as fh:
        return milp_from_dict(json.load(fh))
