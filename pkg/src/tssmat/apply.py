"""
Linear-time matrix-vector product.

Each directed edge ``(i, j)`` carries a state ``g_(i,j)`` of length
``rho(i,j)``. Up-edge states only depend on states deeper in the tree, so
they are evaluated leaves-first; down-edge states depend on the state
entering the parent from above and on the sibling up-states, so they are
evaluated root-first afterwards.
"""

import numpy as np

from .errors import LengthMismatch


def matvec(t, x, return_states=False):
    """
    Compute ``b = T x`` from the generators.

    Parameters
    ----------
    t : TssMatrix
    x : array_like, shape (N,)
    return_states : bool
        Also return the edge states as ``{(i, j): g}``.
    """
    tree, layout = t.tree, t.layout
    x = np.asarray(x, dtype=float)
    if x.shape != (layout.N,):
        raise LengthMismatch(f"x has shape {x.shape}, expected ({layout.N},)")
    xs = layout.split_cols(x)
    sp = t.spinners
    b = {i: sp[i].D @ xs[i] for i in tree.nodes}
    g = {}

    for i, j in tree.up_edges_bottom_up():
        s = sp[i].Inp[j] @ xs[i]
        for w in tree.children[i]:
            s = s + sp[i].Trans[(j, w)] @ g[(w, i)]
        g[(i, j)] = s
        b[j] = b[j] + sp[j].Out[i] @ s

    for j, i in tree.down_edges_top_down():
        s = sp[j].Inp[i] @ xs[j]
        k = tree.parent[j]
        if k is not None:
            s = s + sp[j].Trans[(i, k)] @ g[(k, j)]
        for v in tree.siblings(i):
            s = s + sp[j].Trans[(i, v)] @ g[(v, j)]
        g[(j, i)] = s
        b[i] = b[i] + sp[i].Out[j] @ s

    out = np.concatenate([b[i] for i in tree.nodes]) if tree.K else np.zeros(0)
    if return_states:
        return out, g
    return out


def matvec_opcount(t):
    """Scalar multiply-adds performed by :func:`matvec`, from dimensions alone."""
    tree, layout = t.tree, t.layout
    rho = t.profile
    ops = sum(layout.m_of(i) * layout.n_of(i) for i in tree.nodes)
    for i, j in tree.up_edges_bottom_up():
        ops += rho[(i, j)] * layout.n_of(i)
        ops += sum(rho[(i, j)] * rho[(w, i)] for w in tree.children[i])
        ops += layout.m_of(j) * rho[(i, j)]
    for j, i in tree.down_edges_top_down():
        ops += rho[(j, i)] * layout.n_of(j)
        k = tree.parent[j]
        if k is not None:
            ops += rho[(j, i)] * rho[(k, j)]
        ops += sum(rho[(j, i)] * rho[(v, j)] for v in tree.siblings(i))
        ops += layout.m_of(i) * rho[(j, i)]
    return ops
