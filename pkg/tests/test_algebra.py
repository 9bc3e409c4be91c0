import numpy as np
import pytest

from tssmat import (
    BlockLayout,
    GraphPartitionedMatrix,
    add,
    construct_tss,
    diagonal_tss,
    hankel_rank_profile,
    identity_tss,
    inverse,
    line_tree,
    multiply,
    numerical_rank,
    profile_leq,
    random_tss,
    to_dense,
    uniform_profile,
    unit_hankel,
    verify_girs,
)
from tssmat.errors import LayoutMismatch
from tssmat.generators import dense_random, well_conditioned_tss_dense


def brute_profile(t):
    T = to_dense(t)
    return {e: numerical_rank(unit_hankel(T, e)) for e in t.tree.directed_edges()}


@pytest.fixture
def pair(gd7):
    lay = BlockLayout.uniform(7, 2)
    a = random_tss(gd7, lay, uniform_profile(gd7, 1), seed=1)
    b = random_tss(gd7, lay, uniform_profile(gd7, 1), seed=2)
    return a, b


def test_add_zero(pair, gd7):
    a, _ = pair
    zero = diagonal_tss(gd7, {k: np.zeros((2, 2)) for k in gd7.nodes})
    assert add(a, zero).profile == hankel_rank_profile(to_dense(a))


def test_add_negation(pair):
    a, _ = pair
    neg = a.copy()
    for sp in neg.spinners.values():
        sp.D = -sp.D
        sp.Inp = {k: -v for k, v in sp.Inp.items()}
    s = add(a, neg)
    assert set(s.profile.values()) == {0}
    assert not to_dense(s).values.any()


def test_sum_and_product_bounds(pair):
    a, b = pair
    for c in (add(a, b), multiply(a, b)):
        assert profile_leq(brute_profile(c), uniform_profile(a.tree, 2))
        assert c.profile == brute_profile(c)


def test_product_identities(pair, gd7):
    a, _ = pair
    assert multiply(a, identity_tss(gd7, [2] * 7)).profile == hankel_rank_profile(to_dense(a))
    d1 = random_tss(gd7, BlockLayout.uniform(7, 2), uniform_profile(gd7, 0), 3)
    d2 = random_tss(gd7, BlockLayout.uniform(7, 2), uniform_profile(gd7, 0), 4)
    assert set(multiply(d1, d2).profile.values()) == {0}


def test_rectangular_product(gd7):
    a = random_tss(gd7, BlockLayout([1] * 7, [2] * 7), uniform_profile(gd7, 1), 0)
    b = random_tss(gd7, BlockLayout([2] * 7, [3] * 7), uniform_profile(gd7, 1), 1)
    c = multiply(a, b)
    assert c.shape == (7, 21)
    np.testing.assert_allclose(to_dense(c).values, to_dense(a).values @ to_dense(b).values, atol=1e-12)
    with pytest.raises(LayoutMismatch):
        multiply(b, b)


def test_inverse(gd7):
    eye = identity_tss(gd7, [2] * 7)
    inv = inverse(eye)
    np.testing.assert_allclose(to_dense(inv).values, np.eye(14))
    assert set(inv.profile.values()) == {0}

    t = construct_tss(well_conditioned_tss_dense(gd7, 2, 1, seed=5))
    ti = inverse(t)
    assert ti.profile == t.profile
    np.testing.assert_allclose(to_dense(inverse(ti)).values, to_dense(t).values, rtol=1e-10, atol=1e-10)


def test_tree_sparse_inverse_ranks():
    from tssmat.generators import tree_sparse_inverse

    tree = line_tree(7)
    t = construct_tss(tree_sparse_inverse(tree, BlockLayout.uniform(7, 2), seed=0))
    assert max(t.profile.values()) <= 2


def test_girs_examples(gd7):
    lay = BlockLayout.uniform(7, 1)
    rep = verify_girs(GraphPartitionedMatrix(np.eye(7), lay, gd7), c=0)
    assert rep.ok and rep.exhaustive and rep.subsets_checked == 2**7 - 2
    assert verify_girs(GraphPartitionedMatrix(np.ones((7, 7)), lay, gd7), c=1).ok
    t = random_tss(gd7, BlockLayout.uniform(7, 3), uniform_profile(gd7, 2), 6)
    rep = verify_girs(to_dense(t), c=2)
    assert rep.ok and rep.max_ratio <= 2
    bad = verify_girs(dense_random(gd7, BlockLayout.uniform(7, 3), 0), c=1)
    assert not bad.ok
    A, r, n = bad.violations[0]
    assert r > n


def test_girs_sampled():
    tree = line_tree(14)
    t = random_tss(tree, BlockLayout.uniform(14, 2), uniform_profile(tree, 1), 7)
    rep = verify_girs(to_dense(t), c=1, trials=50, seed=1)
    assert not rep.exhaustive and rep.subsets_checked == 50 + 2 * 13
    assert rep.ok
    with pytest.raises(ValueError):
        verify_girs(to_dense(t), c=-1)


@pytest.mark.parametrize("seed", range(4))
def test_girs_constant_matches_edge_ranks(seed):
    """Exhaustively, GIRS holds with constant c exactly when every edge rank is at most c."""
    from conftest import random_instance

    tree, layout = random_instance(seed, kmin=4, kmax=9, smax=2, allow_empty=False)
    rng = np.random.default_rng(seed)
    T = to_dense(random_tss(tree, layout, {e: int(rng.integers(0, 3)) for e in tree.directed_edges()}, seed))
    top = max(hankel_rank_profile(T).values())
    for c in range(top + 2):
        rep = verify_girs(T, c)
        assert rep.exhaustive
        assert rep.ok == (top <= c)
