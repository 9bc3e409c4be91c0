"""
Sums, products and inverses of TSS matrices, plus a GIRS checker.

The arithmetic goes through the dense matrix and back through
:func:`construct_tss`, so the result always carries the minimal rank
profile of the exact sum/product/inverse. That profile is bounded by the
entrywise sum of the operand profiles (sum, product) or equal to the
operand's minimal profile (inverse).
"""

from dataclasses import dataclass, field

import numpy as np

from .blockmat import BlockLayout, GraphPartitionedMatrix, border_edge_count, hankel_induced
from .construct import construct_tss
from .errors import LayoutMismatch, NotSquare
from .lowrank import DEFAULT_TOL, noise_floor, numerical_rank
from .solve import dense_solve
from .tss import to_dense


def _same_tree(a, b):
    if a.tree != b.tree:
        raise LayoutMismatch("operands live on different trees")


def add(a, b, tol=DEFAULT_TOL):
    _same_tree(a, b)
    if a.layout != b.layout:
        raise LayoutMismatch("operands have different block layouts")
    values = to_dense(a).values + to_dense(b).values
    return construct_tss(GraphPartitionedMatrix(values, a.layout, a.tree), tol)


def multiply(a, b, tol=DEFAULT_TOL):
    """``a @ b``; the input sizes of ``a`` must equal the output sizes of ``b``."""
    _same_tree(a, b)
    if a.layout.n != b.layout.m:
        raise LayoutMismatch("input sizes of the left factor differ from output sizes of the right factor")
    values = to_dense(a).values @ to_dense(b).values
    layout = BlockLayout(a.layout.m, b.layout.n)
    return construct_tss(GraphPartitionedMatrix(values, layout, a.tree), tol)


def inverse(a, tol=DEFAULT_TOL):
    """Inverse of a nonsingular TSS matrix; block layout is transposed."""
    if a.layout.M != a.layout.N:
        raise NotSquare(f"matrix is {a.layout.M} x {a.layout.N}")
    values = dense_solve(to_dense(a).values, np.eye(a.layout.N))
    return construct_tss(GraphPartitionedMatrix(values, a.layout.transposed(), a.tree), tol)


def profile_leq(p, q):
    """Entrywise ``p <= q`` over all directed edges."""
    return all(p[e] <= q[e] for e in p)


def profile_sum(p, q):
    return {e: p[e] + q[e] for e in p}


@dataclass
class GirsReport:
    c: float
    subsets_checked: int
    exhaustive: bool
    max_ratio: float
    # (subset, rank, border edge count) triples with rank > c * count
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "c": self.c,
            "subsets_checked": self.subsets_checked,
            "exhaustive": self.exhaustive,
            "girs_max_ratio": self.max_ratio,
            "violations": [{"subset": list(s), "rank": r, "border_edges": n} for s, r, n in self.violations],
        }


def _subset_from_bits(K, bits):
    return tuple(i + 1 for i in range(K) if bits >> i & 1)


def candidate_subsets(tree, trials, seed):
    """Every proper subset if there are at most 1024, else the unit-Hankel subsets plus random ones."""
    K = tree.K
    if K < 2:
        return [], True
    if 2 ** K <= 1024:
        return [_subset_from_bits(K, bits) for bits in range(1, 2 ** K - 1)], True
    subsets = []
    for i in tree.nodes:
        if i != tree.root:
            d = tree.descendants(i)
            subsets += [d, tree.complement(d)]
    rng = np.random.default_rng(seed)
    drawn = 0
    while drawn < trials:
        mask = rng.integers(0, 2, K).astype(bool)
        if 0 < mask.sum() < K:
            subsets.append(tuple(int(i) + 1 for i in np.flatnonzero(mask)))
            drawn += 1
    return subsets, False


def verify_girs(T, c, trials=200, seed=0, tol=DEFAULT_TOL):
    """
    Check ``rank T<complement(A), A> <= c * border_edge_count(A)``.

    Parameters
    ----------
    T : GraphPartitionedMatrix
    c : float
        Candidate GIRS constant, nonnegative.
    trials : int
        Random subsets to sample when exhaustive enumeration is too large.
    seed : int
    tol : float
        Relative rank tolerance.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    subsets, exhaustive = candidate_subsets(T.tree, trials, seed)
    report = GirsReport(c, len(subsets), exhaustive, 0.0)
    atol = noise_floor(T.values)
    for A in subsets:
        r = numerical_rank(hankel_induced(T, A), tol, atol)
        n = border_edge_count(T.tree, A)
        report.max_ratio = max(report.max_ratio, r / n)
        if r > c * n:
            report.violations.append((A, r, n))
    return report
