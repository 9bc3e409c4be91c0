"""
Dense-to-TSS conversion.

The upsweep factors the unit Hankel block of every up-edge from the leaves
towards the root; the downsweep then factors every down-edge from the root
towards the leaves. Each factorization reuses the factors already computed
for neighbouring edges, so only a thin matrix ``F`` is compressed per edge:

    H_e = F_e @ G_e,   G_e = blockdiag(Y_{e_1}, ..., Y_{e_t}, I)

``rank_reveal`` returns right factors with orthonormal rows, which makes
every ``Y_e`` (and hence every ``G_e``) row-orthonormal by induction. The
singular values of ``F_e`` are then exactly those of ``H_e``, so the ranks
picked by the sweep match the ranks of the unit Hankel blocks themselves.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .blockmat import local_index, submatrix, unit_hankel
from .errors import NonFiniteInput
from .lowrank import DEFAULT_TOL, noise_floor, rank_reveal
from .tss import SpinnerTable, TssMatrix


@dataclass
class EdgeFactors:
    """Factors kept for one directed edge during the sweeps."""

    F: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    Y: np.ndarray
    row_nodes: tuple
    col_nodes: tuple
    # (label, width) of each column group of F; label is the edge whose
    # factor fills the group, or the node whose own input closes it
    groups: list
    G_blocks: list

    @property
    def rank(self):
        return self.X.shape[1]

    def G(self):
        return scipy.linalg.block_diag(*self.G_blocks) if self.G_blocks else np.zeros((0, 0))


@dataclass
class SweepWorkspace:
    """Per-edge factors retained by :func:`construct_tss` when requested."""

    edges: dict = field(default_factory=dict)

    def __getitem__(self, e):
        return self.edges[e]


def _restrict(layout, X, row_nodes, subset):
    return X[local_index(layout.m, row_nodes, subset)]


def _compress(T, e, row_nodes, pieces, own_node, tol, atol):
    """Factor ``[X_1|...|X_t|T<rows, own>]`` and thread the ``Y`` factors through ``G``.

    ``pieces`` is a list of ``(edge, EdgeFactors)`` whose ``X`` restricted to
    ``row_nodes`` fills the leading column groups.
    """
    layout = T.layout
    blocks, groups, G_blocks, col_nodes = [], [], [], []
    for edge, fac in pieces:
        blocks.append(_restrict(layout, fac.X, fac.row_nodes, row_nodes))
        groups.append((edge, fac.rank))
        G_blocks.append(fac.Y)
        col_nodes.extend(fac.col_nodes)
    blocks.append(submatrix(T, row_nodes, (own_node,)))
    groups.append((own_node, layout.n_of(own_node)))
    G_blocks.append(np.eye(layout.n_of(own_node)))
    col_nodes.append(own_node)

    F = np.hstack(blocks)
    lr = rank_reveal(F, tol, atol)
    Z_parts = np.split(lr.Z, np.cumsum([w for _, w in groups])[:-1], axis=1)
    Y = np.hstack([Zp @ Gb for Zp, Gb in zip(Z_parts, G_blocks)])
    fac = EdgeFactors(F, lr.X, lr.Z, Y, tuple(row_nodes), tuple(col_nodes), groups, G_blocks)
    return fac, Z_parts


def construct_tss(T, tol=DEFAULT_TOL, workspace=None):
    """
    Minimal TSS representation of a dense graph-partitioned matrix.

    Parameters
    ----------
    T : GraphPartitionedMatrix
    tol : float
        Relative truncation tolerance applied to every unit Hankel block.
        Singular values below :func:`noise_floor` of ``T`` are dropped as
        rounding noise regardless of ``tol``.
    workspace : SweepWorkspace, optional
        If given, it is filled with the per-edge factors.

    Returns
    -------
    TssMatrix
    """
    tree, layout = T.tree, T.layout
    if not np.all(np.isfinite(T.values)):
        raise NonFiniteInput("matrix contains NaN or Inf")
    atol = noise_floor(T.values)
    facs = {}
    profile = {}
    spinners = {k: SpinnerTable(submatrix(T, (k,), (k,)).copy()) for k in tree.nodes}

    for i, j in tree.up_edges_bottom_up():
        rows = tree.complement(tree.descendants(i))
        pieces = [((w, i), facs[(w, i)]) for w in tree.children[i]]
        fac, Z_parts = _compress(T, (i, j), rows, pieces, i, tol, atol)
        facs[(i, j)] = fac
        profile[(i, j)] = fac.rank
        sp = spinners[i]
        for w, Zp in zip(tree.children[i], Z_parts):
            sp.Trans[(j, w)] = Zp
        sp.Inp[j] = Z_parts[-1]
        spinners[j].Out[i] = _restrict(layout, fac.X, rows, (j,))

    for j, i in tree.down_edges_top_down():
        rows = tree.descendants(i)
        k = tree.parent[j]
        sources = ([k] if k is not None else []) + list(tree.siblings(i))
        pieces = [((s, j), facs[(s, j)]) for s in sources]
        fac, Z_parts = _compress(T, (j, i), rows, pieces, j, tol, atol)
        facs[(j, i)] = fac
        profile[(j, i)] = fac.rank
        sp = spinners[j]
        for s, Zp in zip(sources, Z_parts):
            sp.Trans[(i, s)] = Zp
        sp.Inp[i] = Z_parts[-1]
        spinners[i].Out[j] = _restrict(layout, fac.X, rows, (i,))

    if workspace is not None:
        workspace.edges.update(facs)
    return TssMatrix(tree, layout, profile, spinners)


def hankel_rank_profile(T, tol=DEFAULT_TOL):
    """Ranks of all unit Hankel blocks, computed directly from the dense matrix."""
    atol = noise_floor(T.values)
    return {e: rank_reveal(unit_hankel(T, e), tol, atol).rank for e in T.tree.directed_edges()}
