import numpy as np
import pytest

from tssmat import BlockLayout, RootedTree, random_tree

GD7_EDGES = [(1, 5), (2, 5), (5, 7), (6, 7), (3, 6), (4, 6)]
GA4_EDGES = [(1, 3), (2, 3), (3, 4)]


@pytest.fixture
def gd7():
    return RootedTree(7, GD7_EDGES, 7)


@pytest.fixture
def ga4():
    return RootedTree(4, GA4_EDGES, 4)


def random_instance(seed, kmin=3, kmax=31, smax=5, square=False, allow_empty=True):
    """Seeded (tree, layout) pair with random block sizes."""
    rng = np.random.default_rng(seed)
    K = int(rng.integers(kmin, kmax + 1))
    tree = random_tree(K, rng)
    lo = 0 if allow_empty else 1
    m = rng.integers(lo, smax + 1, K)
    n = m if square else rng.integers(lo, smax + 1, K)
    return tree, BlockLayout(m, n)


def singular_pivot_instance(K=5, seed=0):
    """
    Nonsingular TSS matrix whose leaf block group is rank deficient.

    Zeroing the leaf's output map from its parent leaves the incoming state
    column of that group empty, so block-confined pivoting must fail even
    though the diagonal shift keeps ``T`` itself well conditioned.
    """
    from tssmat import line_tree, random_tss, to_dense, uniform_profile

    tree = line_tree(K)
    t = random_tss(tree, BlockLayout.uniform(K, 1), uniform_profile(tree, 1), seed)
    t.spinners[1].Out[2] = np.zeros_like(t.spinners[1].Out[2])
    shift = 2.0 * np.linalg.norm(to_dense(t).values, 2) + 1.0
    for k in tree.nodes:
        t.spinners[k].D = t.spinners[k].D + shift * np.eye(1)
    return t
