"""
Tree semi-separable representations.

Every node ``k`` carries a spinner table of generators:

``D``
    ``m_k x n_k`` input-to-output map.
``Inp[j]``
    ``rho(k,j) x n_k`` input-to-edge map onto the outgoing edge ``(k, j)``.
``Out[i]``
    ``m_k x rho(i,k)`` edge-to-output map from the incoming edge ``(i, k)``.
``Trans[(i, j)]``
    ``rho(k,i) x rho(j,k)`` edge-to-edge map routing the state on ``(j, k)``
    onto ``(k, i)``, for distinct neighbours ``i != j``.

Off-diagonal block ``T<i,j>`` is the product of these generators along the
unique path from ``j`` to ``i``.

Once a root is fixed the generators get their rooted names (``B``, ``P``,
``U``, ``V``, ``W``, ``C``, ``Q``); :class:`TssMatrix` exposes them as
accessor methods over the same storage.
"""

from dataclasses import dataclass, field

import numpy as np

from .blockmat import BlockLayout, GraphPartitionedMatrix
from .errors import LayoutMismatch, MissingGenerator, ShapeMismatch, TssError


class UnexpectedGenerator(TssError, ValueError):
    pass


@dataclass
class SpinnerTable:
    D: np.ndarray
    Inp: dict = field(default_factory=dict)
    Out: dict = field(default_factory=dict)
    Trans: dict = field(default_factory=dict)

    def copy(self):
        return SpinnerTable(
            self.D.copy(),
            {k: v.copy() for k, v in self.Inp.items()},
            {k: v.copy() for k, v in self.Out.items()},
            {k: v.copy() for k, v in self.Trans.items()},
        )


def uniform_profile(tree, rho):
    return {e: int(rho) for e in tree.directed_edges()}


def validate_profile(tree, profile):
    expected = set(tree.directed_edges())
    got = set(profile)
    if expected - got:
        raise MissingGenerator(f"rank profile lacks edges {sorted(expected - got)}")
    if got - expected:
        raise UnexpectedGenerator(f"rank profile has non-edges {sorted(got - expected)}")
    for e, r in profile.items():
        if int(r) != r or r < 0:
            raise ValueError(f"rank of edge {e} must be a nonnegative integer, got {r}")


def expected_shapes(tree, layout, profile, k):
    """Required generator shapes at node ``k`` as ``{(kind, key): shape}``."""
    rho = profile
    shapes = {("D", None): (layout.m_of(k), layout.n_of(k))}
    nbrs = tree.neighbors(k)
    for j in nbrs:
        shapes[("Inp", j)] = (rho[(k, j)], layout.n_of(k))
        shapes[("Out", j)] = (layout.m_of(k), rho[(j, k)])
        for i in nbrs:
            if i != j:
                shapes[("Trans", (i, j))] = (rho[(k, i)], rho[(j, k)])
    return shapes


class TssMatrix:
    """
    TSS representation: tree, block layout, rank profile and spinner tables.

    Parameters
    ----------
    tree : RootedTree
    layout : BlockLayout
    profile : dict
        ``{(i, j): rho}`` for both orientations of every tree edge.
    spinners : dict
        ``{k: SpinnerTable}`` for every node.
    validate : bool
        Check all generator shapes on construction (default).
    """

    def __init__(self, tree, layout, profile, spinners, validate=True):
        self.tree = tree
        self.layout = layout
        self.profile = {tuple(e): int(r) for e, r in profile.items()}
        self.spinners = spinners
        if validate:
            self.validate()

    def validate(self):
        tree, layout = self.tree, self.layout
        if layout.K != tree.K:
            raise LayoutMismatch(f"layout has {layout.K} nodes, tree has {tree.K}")
        validate_profile(tree, self.profile)
        for k in tree.nodes:
            if k not in self.spinners:
                raise MissingGenerator(f"node {k} has no spinner table")
            sp = self.spinners[k]
            tables = {"D": {None: sp.D}, "Inp": sp.Inp, "Out": sp.Out, "Trans": sp.Trans}
            shapes = expected_shapes(tree, layout, self.profile, k)
            for (kind, key), shape in shapes.items():
                table = tables[kind]
                if key not in table or table[key] is None:
                    raise MissingGenerator(f"node {k}: missing {kind}[{key}]")
                got = np.shape(table[key])
                if got != shape:
                    raise ShapeMismatch(k, f"{kind}[{key}]" if key is not None else kind, shape, got)
            for kind in ("Inp", "Out", "Trans"):
                extra = [key for key in tables[kind] if (kind, key) not in shapes]
                if extra:
                    raise UnexpectedGenerator(f"node {k}: unexpected {kind} entries {extra}")
        return True

    @property
    def shape(self):
        return (self.layout.M, self.layout.N)

    def rank(self, i, j):
        return self.profile[(i, j)]

    def copy(self):
        return TssMatrix(
            self.tree,
            self.layout,
            dict(self.profile),
            {k: sp.copy() for k, sp in self.spinners.items()},
            validate=False,
        )

    # Rooted nomenclature. ``k`` is always the node owning the spinner table.

    def D(self, k):
        return self.spinners[k].D

    def B(self, k):
        """Input-to-edge map of ``k`` towards its parent."""
        return self.spinners[k].Inp[self.tree.parent[k]]

    def P(self, k, child):
        return self.spinners[k].Inp[child]

    def C(self, k, child):
        return self.spinners[k].Out[child]

    def Q(self, k):
        """Edge-to-output map of ``k`` from its parent."""
        return self.spinners[k].Out[self.tree.parent[k]]

    def U(self, k, child):
        """Routes the state arriving from ``child`` up to the parent of ``k``."""
        return self.spinners[k].Trans[(self.tree.parent[k], child)]

    def W(self, k, child):
        """Routes the state arriving from the parent of ``k`` down to ``child``."""
        return self.spinners[k].Trans[(child, self.tree.parent[k])]

    def V(self, k, child, other):
        """Routes the state arriving from child ``other`` to child ``child``."""
        return self.spinners[k].Trans[(child, other)]


def block_entry(t, i, j):
    """
    Block ``T<i,j>`` evaluated as a product along the path ``j -> i``.

    The product is accumulated right to left, starting from the input map
    at ``j``. Zero ranks give correctly shaped zero blocks.
    """
    tree = t.tree
    if i == j:
        tree._check_id(i)
        return t.spinners[i].D.copy()
    path = tree.path_between(j, i)
    acc = t.spinners[j].Inp[path[1]]
    for a in range(1, len(path) - 1):
        prev, node, nxt = path[a - 1], path[a], path[a + 1]
        acc = t.spinners[node].Trans[(nxt, prev)] @ acc
    return t.spinners[i].Out[path[-2]] @ acc


def _column_blocks(t, j):
    """All blocks ``T<i,j>`` for fixed ``j`` by propagating outward from ``j``."""
    tree = t.tree
    out = {j: t.spinners[j].D.copy()}
    stack = [(j, nb, t.spinners[j].Inp[nb]) for nb in tree.neighbors(j)]
    while stack:
        prev, node, acc = stack.pop()
        out[node] = t.spinners[node].Out[prev] @ acc
        for nxt in tree.neighbors(node):
            if nxt != prev:
                stack.append((node, nxt, t.spinners[node].Trans[(nxt, prev)] @ acc))
    return out


def to_dense(t):
    """Assemble the full graph-partitioned matrix."""
    layout = t.layout
    values = np.zeros((layout.M, layout.N))
    ro, co = layout.row_offsets, layout.col_offsets
    for j in t.tree.nodes:
        for i, blk in _column_blocks(t, j).items():
            values[ro[i - 1]:ro[i], co[j - 1]:co[j]] = blk
    return GraphPartitionedMatrix(values, layout, t.tree)


def random_tss(tree, layout, profile, seed):
    """TSS matrix with seeded standard-normal generators."""
    if layout.K != tree.K:
        raise LayoutMismatch(f"layout has {layout.K} nodes, tree has {tree.K}")
    validate_profile(tree, profile)
    rng = np.random.default_rng(seed)
    spinners = {}
    for k in tree.nodes:
        sp = SpinnerTable(np.zeros((0, 0)))
        for (kind, key), shape in sorted(
            expected_shapes(tree, layout, profile, k).items(), key=lambda kv: (kv[0][0], str(kv[0][1]))
        ):
            arr = rng.standard_normal(shape)
            if kind == "D":
                sp.D = arr
            else:
                getattr(sp, kind)[key] = arr
        spinners[k] = sp
    return TssMatrix(tree, layout, profile, spinners)


def diagonal_tss(tree, blocks):
    """Block-diagonal TSS (all ranks zero) from ``{node: D}``."""
    layout = BlockLayout(
        [np.shape(blocks[k])[0] for k in tree.nodes], [np.shape(blocks[k])[1] for k in tree.nodes]
    )
    profile = uniform_profile(tree, 0)
    spinners = {}
    for k in tree.nodes:
        sp = SpinnerTable(np.array(blocks[k], dtype=float))
        for (kind, key), shape in expected_shapes(tree, layout, profile, k).items():
            if kind != "D":
                getattr(sp, kind)[key] = np.zeros(shape)
        spinners[k] = sp
    return TssMatrix(tree, layout, profile, spinners)


def identity_tss(tree, sizes):
    """Identity with ``sizes[k-1] x sizes[k-1]`` diagonal blocks."""
    return diagonal_tss(tree, {k: np.eye(sizes[k - 1]) for k in tree.nodes})
