"""Seeded test-matrix generators used by the CLI, the benchmarks and the tests."""

import numpy as np

from .blockmat import BlockLayout, GraphPartitionedMatrix
from .errors import LayoutMismatch
from .solve import dense_solve
from .tss import random_tss, to_dense, uniform_profile

# diagonal shift for tree-sparse matrices, in units of the largest absolute row sum
DOMINANCE_FACTOR = 4.0


def dense_random(tree, layout, seed):
    rng = np.random.default_rng(seed)
    return GraphPartitionedMatrix(rng.standard_normal((layout.M, layout.N)), layout, tree)


def tree_sparse(tree, layout, seed):
    """
    Block tree-sparse matrix: random blocks on the diagonal and on tree edges
    only, shifted by ``DOMINANCE_FACTOR`` times its largest absolute row sum
    so it is strictly diagonally dominant.
    """
    if layout.m != layout.n:
        raise LayoutMismatch("tree-sparse matrices need square diagonal blocks (m_i == n_i)")
    rng = np.random.default_rng(seed)
    S = np.zeros((layout.M, layout.N))
    pairs = [(i, i) for i in tree.nodes] + tree.directed_edges()
    for i, j in pairs:
        ri, cj = layout.row_index((i,)), layout.col_index((j,))
        S[np.ix_(ri, cj)] = rng.standard_normal((ri.size, cj.size))
    shift = DOMINANCE_FACTOR * (np.abs(S).sum(axis=1).max() if S.size else 0.0)
    S += shift * np.eye(layout.M)
    return GraphPartitionedMatrix(S, layout, tree)


def tree_sparse_inverse(tree, layout, seed):
    S = tree_sparse(tree, layout, seed)
    return GraphPartitionedMatrix(dense_solve(S.values, np.eye(layout.M)), layout, tree)


def random_tss_dense(tree, layout, rank, seed):
    return to_dense(random_tss(tree, layout, uniform_profile(tree, rank), seed))


def well_conditioned_tss_dense(tree, size, rank, seed):
    """
    Dense square matrix with unit-Hankel ranks at most ``rank``.

    A random TSS matrix plus a multiple of the identity; the identity has no
    off-diagonal coupling, so the shift leaves every Hankel rank unchanged.
    Transfer generators are scaled to unit spectral norm so that path
    products do not grow exponentially with the distance between nodes.
    """
    sizes = [size] * tree.K if np.isscalar(size) else list(size)
    layout = BlockLayout(sizes, sizes)
    t = random_tss(tree, layout, uniform_profile(tree, rank), seed)
    for sp in t.spinners.values():
        for key, G in sp.Trans.items():
            norm = np.linalg.norm(G, 2) if G.size else 0.0
            if norm > 0:
                sp.Trans[key] = G / norm
    T = to_dense(t).values
    shift = 2.0 * (np.linalg.norm(T, 2) if T.size else 0.0) + 1.0
    return GraphPartitionedMatrix(T + shift * np.eye(layout.M), layout, tree)
