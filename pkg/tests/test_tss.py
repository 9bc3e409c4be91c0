import numpy as np
import pytest

from tssmat import (
    BlockLayout,
    block_entry,
    construct_tss,
    diagonal_tss,
    hss_binary_tree,
    identity_tss,
    line_tree,
    random_tss,
    submatrix,
    to_dense,
    uniform_profile,
)
from tssmat.errors import MissingGenerator, ShapeMismatch
from tssmat.generators import dense_random


def test_diagonal_tss_validates(gd7):
    t = diagonal_tss(gd7, {k: np.full((1, 2), k) for k in gd7.nodes})
    assert t.validate()
    dense = to_dense(t).values
    assert dense.shape == (7, 14)
    assert np.count_nonzero(dense) == 14


def test_transposed_generator_rejected(gd7):
    t = random_tss(gd7, BlockLayout.uniform(7, 2), uniform_profile(gd7, 1), seed=0)
    bad = t.copy()
    bad.spinners[3].Inp[6] = bad.spinners[3].Inp[6].T
    with pytest.raises(ShapeMismatch) as info:
        bad.validate()
    assert info.value.node == 3 and "Inp[6]" in str(info.value)


def test_missing_generator(gd7):
    t = random_tss(gd7, BlockLayout.uniform(7, 1), uniform_profile(gd7, 1), seed=0)
    del t.spinners[7].Out[5]
    with pytest.raises(MissingGenerator):
        t.validate()


def test_constructed_fixture_validates(gd7):
    T = dense_random(gd7, BlockLayout.uniform(7, 2), seed=4)
    assert construct_tss(T).validate()


def test_block_entry_worked_example(ga4):
    t = random_tss(ga4, BlockLayout.uniform(4, 2), uniform_profile(ga4, 2), seed=5)
    expect = t.C(4, 3) @ t.U(3, 1) @ t.B(1)
    np.testing.assert_allclose(block_entry(t, 4, 1), expect, rtol=1e-14)
    # two children of node 3 talk through V
    np.testing.assert_allclose(block_entry(t, 1, 2), t.Q(1) @ t.V(3, 1, 2) @ t.B(2), rtol=1e-14)
    np.testing.assert_allclose(block_entry(t, 1, 4), t.Q(1) @ t.W(3, 1) @ t.P(4, 3), rtol=1e-14)


def test_block_entry_matches_dense(gd7):
    rng = np.random.default_rng(7)
    layout = BlockLayout(rng.integers(0, 4, 7), rng.integers(0, 4, 7))
    profile = {e: int(rng.integers(0, 3)) for e in gd7.directed_edges()}
    t = random_tss(gd7, layout, profile, seed=8)
    T = to_dense(t)
    for i in gd7.nodes:
        for j in gd7.nodes:
            np.testing.assert_allclose(block_entry(t, i, j), submatrix(T, (i,), (j,)), atol=1e-13)
    assert np.allclose(block_entry(t, 5, 1), t.spinners[5].Out[1] @ t.spinners[1].Inp[5])


def test_random_tss_determinism(gd7):
    lay, prof = BlockLayout.uniform(7, 2), uniform_profile(gd7, 1)
    a, b = random_tss(gd7, lay, prof, 1), random_tss(gd7, lay, prof, 1)
    np.testing.assert_array_equal(to_dense(a).values, to_dense(b).values)
    c = random_tss(gd7, lay, prof, 2)
    assert np.linalg.norm(to_dense(a).values - to_dense(c).values) > 0


def test_rank_zero_is_block_diagonal(gd7):
    t = random_tss(gd7, BlockLayout.uniform(7, 2), uniform_profile(gd7, 0), seed=3)
    dense = to_dense(t).values
    mask = np.kron(np.eye(7), np.ones((2, 2))).astype(bool)
    assert not dense[~mask].any()


def test_sss_pattern_on_line():
    """Lower blocks go up the chain through U; upper blocks come down through W."""
    tree = line_tree(4)
    t = random_tss(tree, BlockLayout.uniform(4, 2), uniform_profile(tree, 2), seed=11)
    for i in tree.nodes:
        for j in tree.nodes:
            if i > j:
                expect = t.B(j)
                for k in range(j + 1, i):
                    expect = t.U(k, k - 1) @ expect
                expect = t.C(i, i - 1) @ expect
            elif i < j:
                expect = t.P(j, j - 1)
                for k in range(j - 1, i, -1):
                    expect = t.W(k, k - 1) @ expect
                expect = t.Q(i) @ expect
            else:
                expect = t.D(i)
            np.testing.assert_allclose(block_entry(t, i, j), expect, rtol=1e-13)
    # the end nodes have no V generators
    assert not t.spinners[1].Trans and not t.spinners[4].Trans


def test_hss_empty_nodes():
    tree, empty = hss_binary_tree(4)
    sizes = [0 if k in empty else 2 for k in tree.nodes]
    t = random_tss(tree, BlockLayout(sizes, sizes), uniform_profile(tree, 1), seed=0)
    for k in empty:
        sp = t.spinners[k]
        assert sp.D.size == 0
        assert all(v.size == 0 for v in sp.Inp.values())
        assert all(v.size == 0 for v in sp.Out.values())
        assert all(v.shape == (1, 1) for v in sp.Trans.values())
    assert to_dense(t).shape == (8, 8)


def test_identity_tss():
    tree = line_tree(3)
    np.testing.assert_array_equal(to_dense(identity_tss(tree, [1, 2, 3])).values, np.eye(6))
