"""
Graph-partitioned dense matrices.

Node ``i`` owns ``m_i`` consecutive rows and ``n_i`` consecutive columns of
the dense matrix. Block ``T<i,j>`` maps node-``j`` inputs to node-``i``
outputs. Zero-sized blocks are allowed everywhere.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import BadNodeId, EmptyOrFullSubset, LayoutMismatch, NotATreeEdge
from .tree import RootedTree


@dataclass(frozen=True)
class BlockLayout:
    """Per-node output sizes ``m`` and input sizes ``n`` (index 0 is node 1)."""

    m: tuple
    n: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        n = tuple(int(v) for v in self.n)
        if len(m) != len(n):
            raise LayoutMismatch(f"{len(m)} output sizes but {len(n)} input sizes")
        if any(v < 0 for v in m + n):
            raise LayoutMismatch("block sizes must be nonnegative")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)

    @classmethod
    def uniform(cls, K, m, n=None):
        return cls((m,) * K, ((m if n is None else n),) * K)

    @property
    def K(self):
        return len(self.m)

    @property
    def M(self):
        return sum(self.m)

    @property
    def N(self):
        return sum(self.n)

    @cached_property
    def row_offsets(self):
        return np.concatenate([[0], np.cumsum(self.m, dtype=int)])

    @cached_property
    def col_offsets(self):
        return np.concatenate([[0], np.cumsum(self.n, dtype=int)])

    def m_of(self, i):
        return self.m[i - 1]

    def n_of(self, i):
        return self.n[i - 1]

    def _check(self, nodes):
        for i in nodes:
            if not 1 <= i <= self.K:
                raise BadNodeId(f"node id {i} outside 1..{self.K}")

    def row_index(self, nodes):
        """Scalar row indices of ``nodes`` concatenated in the given order."""
        self._check(nodes)
        off = self.row_offsets
        parts = [np.arange(off[i - 1], off[i]) for i in nodes]
        return np.concatenate(parts).astype(int) if parts else np.zeros(0, dtype=int)

    def col_index(self, nodes):
        self._check(nodes)
        off = self.col_offsets
        parts = [np.arange(off[i - 1], off[i]) for i in nodes]
        return np.concatenate(parts).astype(int) if parts else np.zeros(0, dtype=int)

    def transposed(self):
        return BlockLayout(self.n, self.m)

    def split_rows(self, v):
        """Split a length-``M`` vector into per-node pieces (dict keyed by node id)."""
        off = self.row_offsets
        return {i: v[off[i - 1]:off[i]] for i in range(1, self.K + 1)}

    def split_cols(self, v):
        off = self.col_offsets
        return {i: v[off[i - 1]:off[i]] for i in range(1, self.K + 1)}


def local_index(sizes, nodes, subset):
    """
    Positions of ``subset``'s scalar entries inside a block vector laid out
    over ``nodes`` (in that order) with per-node ``sizes``.
    """
    start = {}
    pos = 0
    for i in nodes:
        start[i] = pos
        pos += sizes[i - 1]
    parts = [np.arange(start[i], start[i] + sizes[i - 1]) for i in subset]
    return np.concatenate(parts).astype(int) if parts else np.zeros(0, dtype=int)


class GraphPartitionedMatrix:
    """Dense ``M x N`` matrix tied to a tree and a block layout."""

    def __init__(self, values, layout, tree):
        values = np.array(values, dtype=float)
        if values.ndim != 2:
            values = values.reshape(layout.M, layout.N)
        if layout.K != tree.K:
            raise LayoutMismatch(f"layout has {layout.K} nodes, tree has {tree.K}")
        if values.shape != (layout.M, layout.N):
            raise LayoutMismatch(f"values have shape {values.shape}, layout needs {(layout.M, layout.N)}")
        values.setflags(write=False)
        self.values = values
        self.layout = layout
        self.tree = tree

    @property
    def shape(self):
        return self.values.shape

    def block(self, i, j):
        return submatrix(self, (i,), (j,))

    def with_values(self, values, layout=None):
        return GraphPartitionedMatrix(values, layout or self.layout, self.tree)


def submatrix(T, rows, cols):
    """Block submatrix ``T<rows, cols>`` with nodes concatenated in the order given."""
    ri = T.layout.row_index(tuple(rows))
    ci = T.layout.col_index(tuple(cols))
    return T.values[np.ix_(ri, ci)]


def _proper_subset(tree, A):
    A = tuple(A)
    for i in A:
        if not 1 <= i <= tree.K:
            raise BadNodeId(f"node id {i} outside 1..{tree.K}")
    if len(set(A)) != len(A):
        raise BadNodeId(f"repeated node ids in {A}")
    if not A or len(A) == tree.K:
        raise EmptyOrFullSubset(f"subset of size {len(A)} is not a nonempty proper subset of {tree.K} nodes")
    return A


def hankel_induced(T, A):
    """Hankel block ``T<complement(A), A>``; rows ascending, columns in the order of ``A``."""
    A = _proper_subset(T.tree, A)
    return submatrix(T, T.tree.complement(A), A)


def unit_hankel_sets(tree, e):
    """
    Row and column node sets of the unit Hankel block of directed edge ``e``.

    For an up-edge ``(i, parent(i))`` the block maps the subtree of ``i`` to
    the rest of the tree; for a down-edge ``(parent(i), i)`` it maps the rest
    of the tree into the subtree. Both sets are ascending.
    """
    a, b = e
    if not tree.is_edge(a, b):
        raise NotATreeEdge(f"{e} is not an edge of the tree")
    if tree.parent[a] == b:
        sub = tree.descendants(a)
        return tree.complement(sub), sub
    sub = tree.descendants(b)
    return sub, tree.complement(sub)


def unit_hankel(T, e):
    rows, cols = unit_hankel_sets(T.tree, e)
    return submatrix(T, rows, cols)


def border_edge_count(tree: RootedTree, A):
    """Number of undirected tree edges with exactly one endpoint in ``A``."""
    A = set(_proper_subset(tree, A))
    return sum((a in A) != (b in A) for a, b in tree.edges)
