"""
File formats.

* tree JSON: ``{"nodes": [{"id", "m", "n"}], "edges": [[i, j]], "root": r}``
* TSS JSON: ``{"tree", "layout", "profile", "spinners"}`` with matrices as
  row-major nested lists
* dense matrices and vectors: CSV, one row per line, no header
"""

import json

import numpy as np

from .blockmat import BlockLayout
from .errors import BadNodeId
from .tree import RootedTree
from .tss import SpinnerTable, TssMatrix, expected_shapes


def tree_to_json(tree, layout):
    return {
        "nodes": [{"id": k, "m": layout.m_of(k), "n": layout.n_of(k)} for k in tree.nodes],
        "edges": [list(e) for e in tree.edges],
        "root": tree.root,
    }


def tree_from_json(data):
    """Parse tree JSON into ``(RootedTree, BlockLayout)``; missing sizes default to 1."""
    nodes = sorted(data["nodes"], key=lambda d: d["id"])
    ids = [int(d["id"]) for d in nodes]
    K = len(ids)
    if ids != list(range(1, K + 1)):
        raise BadNodeId(f"node ids must be 1..{K}, got {ids}")
    tree = RootedTree(K, [tuple(e) for e in data["edges"]], int(data["root"]))
    layout = BlockLayout([int(d.get("m", 1)) for d in nodes], [int(d.get("n", 1)) for d in nodes])
    return tree, layout


def _matrix_json(a):
    return np.asarray(a).tolist()


def tss_to_json(t):
    spinners = []
    for k in t.tree.nodes:
        sp = t.spinners[k]
        spinners.append(
            {
                "node": k,
                "D": _matrix_json(sp.D),
                "Inp": {str(j): _matrix_json(v) for j, v in sorted(sp.Inp.items())},
                "Out": {str(i): _matrix_json(v) for i, v in sorted(sp.Out.items())},
                "Trans": {f"{i},{j}": _matrix_json(v) for (i, j), v in sorted(sp.Trans.items())},
            }
        )
    return {
        "tree": tree_to_json(t.tree, t.layout),
        "layout": {"m": list(t.layout.m), "n": list(t.layout.n)},
        "profile": [{"from": i, "to": j, "rho": r} for (i, j), r in sorted(t.profile.items())],
        "spinners": spinners,
    }


def tss_from_json(data):
    tree, _ = tree_from_json(data["tree"])
    layout = BlockLayout(data["layout"]["m"], data["layout"]["n"])
    profile = {(int(p["from"]), int(p["to"])): int(p["rho"]) for p in data["profile"]}
    # explicit shapes are needed because empty nested lists lose their dimensions
    spinners = {}
    for entry in data["spinners"]:
        k = int(entry["node"])
        shapes = expected_shapes(tree, layout, profile, k) if _profile_complete(tree, profile) else {}

        def arr(v, key):
            a = np.array(v, dtype=float)
            shape = shapes.get(key)
            if shape is not None and a.size == 0:
                a = a.reshape(shape)
            return a

        sp = SpinnerTable(arr(entry["D"], ("D", None)))
        sp.Inp = {int(j): arr(v, ("Inp", int(j))) for j, v in entry.get("Inp", {}).items()}
        sp.Out = {int(i): arr(v, ("Out", int(i))) for i, v in entry.get("Out", {}).items()}
        for key, v in entry.get("Trans", {}).items():
            i, j = (int(s) for s in key.split(","))
            sp.Trans[(i, j)] = arr(v, ("Trans", (i, j)))
        spinners[k] = sp
    return TssMatrix(tree, layout, profile, spinners)


def _profile_complete(tree, profile):
    return set(tree.directed_edges()) <= set(profile)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")


def read_matrix_csv(path, shape=None):
    a = np.loadtxt(path, delimiter=",", ndmin=2)
    if shape is not None:
        a = a.reshape(shape)
    return a


def write_matrix_csv(path, a):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    np.savetxt(path, a, delimiter=",", fmt="%.17g")


def read_vector_csv(path):
    return np.loadtxt(path, delimiter=",", ndmin=1).reshape(-1)


def write_vector_csv(path, v):
    np.savetxt(path, np.asarray(v, dtype=float).reshape(-1, 1), fmt="%.17g")
