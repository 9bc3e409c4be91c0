"""
Acceptance criteria. Each test prints one ``PASS``/``FAIL`` line, then asserts.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import time
from functools import lru_cache

import numpy as np
import pytest

from tssmat import (
    BlockLayout,
    RootedTree,
    SweepWorkspace,
    add,
    assemble_lifted,
    block_entry,
    build_rooted_tree,
    construct_tss,
    dense_solve,
    hankel_rank_profile,
    hss_binary_tree,
    inverse,
    line_tree,
    matvec,
    matvec_opcount,
    multiply,
    numerical_rank,
    profile_leq,
    profile_sum,
    random_tree,
    random_tss,
    solve,
    solve_lifted,
    submatrix,
    to_dense,
    uniform_profile,
    unit_hankel,
    verify_girs,
)
from tssmat.blockmat import local_index
from tssmat.errors import SingularPivotBlock
from tssmat.generators import dense_random, tree_sparse_inverse, well_conditioned_tss_dense

from conftest import GD7_EDGES, singular_pivot_instance


@pytest.fixture
def report(capsys):
    def emit(number, name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}")
        return ok

    return emit


def _tree_and_layout(seed, kmin, kmax, smax, square=False):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(kmin, kmax + 1))
    tree = random_tree(K, rng)
    m = rng.integers(1, smax + 1, K)
    n = m if square else rng.integers(1, smax + 1, K)
    return tree, BlockLayout(m, n)


@lru_cache(maxsize=None)
def roundtrip_corpus():
    """50 dense matrices on random trees, K in [3, 31], blocks up to 5 x 5."""
    out = []
    start = time.perf_counter()
    for seed in range(50):
        tree, layout = _tree_and_layout(1000 + seed, 3, 31, 5)
        T = dense_random(tree, layout, seed)
        t = construct_tss(T, 1e-12)
        out.append((T, t))
    return out, time.perf_counter() - start


def test_criterion_1_roundtrip(report):
    corpus, elapsed = roundtrip_corpus()
    errs = [np.linalg.norm(to_dense(t).values - T.values) / np.linalg.norm(T.values) for T, t in corpus]
    ok = max(errs) <= 1e-10 and elapsed < 60
    report(1, "roundtrip", ok, f"max rel err {max(errs):.2e} over {len(errs)} matrices, construct time {elapsed:.1f}s")
    assert ok


def test_criterion_2_minimality(report):
    corpus, _ = roundtrip_corpus()
    mismatched = sum(t.profile != hankel_rank_profile(T, 1e-12) for T, t in corpus)
    edges = sum(len(t.profile) for _, t in corpus)
    ok = mismatched == 0
    report(2, "minimality", ok, f"{mismatched} of {len(corpus)} profiles differ from unit-Hankel ranks ({edges} edges)")
    assert ok


def _in_ascending_columns(T, fac):
    """Reorder the columns of ``F G`` from sweep order to ascending node order."""
    cols = tuple(sorted(fac.col_nodes))
    return (fac.F @ fac.G())[:, local_index(T.layout.n, fac.col_nodes, cols)]


def test_criterion_3_worked_example(report):
    tree = RootedTree(7, GD7_EDGES, 7)
    T = dense_random(tree, BlockLayout.uniform(7, 2), seed=7)
    ws = SweepWorkspace()
    construct_tss(T, workspace=ws)
    up, down = ws[(5, 7)], ws[(5, 1)]
    err_up = np.abs(_in_ascending_columns(T, up) - unit_hankel(T, (5, 7))).max()
    err_down = np.abs(_in_ascending_columns(T, down) - unit_hankel(T, (5, 1))).max()
    # the down factor reuses X_(7,5) and X_(2,5); the up factor reuses X_(1,5) and X_(2,5)
    reuse = [g for g, _ in up.groups] == [(1, 5), (2, 5), 5] and [g for g, _ in down.groups] == [(7, 5), (2, 5), 5]
    x75 = ws[(7, 5)].X[local_index(T.layout.m, ws[(7, 5)].row_nodes, (1,))]
    shared = np.array_equal(down.F[:, : ws[(7, 5)].rank], x75)
    ok = err_up <= 1e-12 and err_down <= 1e-12 and reuse and shared
    report(3, "worked example", ok, f"|F G - H| = {err_up:.1e} on (5,7), {err_down:.1e} on (5,1); factor reuse {reuse and shared}")
    assert ok


def _sss_structure_ok(t):
    tree = t.tree
    for k in tree.nodes:
        keys = set(t.spinners[k].Trans)
        expect = set()
        if 1 < k < tree.K:
            expect = {(k + 1, k - 1), (k - 1, k + 1)}
        if keys != expect:
            return False
    T = to_dense(t)
    for i in tree.nodes:
        for j in tree.nodes:
            if i > j:
                e = t.B(j)
                for k in range(j + 1, i):
                    e = t.U(k, k - 1) @ e
                e = t.C(i, i - 1) @ e
            elif i < j:
                e = t.P(j, j - 1)
                for k in range(j - 1, i, -1):
                    e = t.W(k, k - 1) @ e
                e = t.Q(i) @ e
            else:
                e = t.D(i)
            if not np.allclose(e, submatrix(T, (i,), (j,)), atol=1e-12):
                return False
    return True


def test_criterion_4_special_cases(report):
    s = 2
    tree = line_tree(4)
    layout = BlockLayout.uniform(4, s)
    T = dense_random(tree, layout, seed=4)
    t = construct_tss(T)
    generic = {(i, i + 1): min(s * i, s * (4 - i)) for i in range(1, 4)}
    generic.update({(i + 1, i): r for (i, _), r in generic.items()})
    sss_ok = t.profile == generic and _sss_structure_ok(t)

    lower = T.with_values(np.tril(T.values, -1) + np.kron(np.eye(4), np.ones((s, s))) * T.values)
    tl = construct_tss(lower)
    zero_ok = all(tl.profile[(i + 1, i)] == 0 for i in range(1, 4))
    zero_ok &= all(tl.profile[(i, i + 1)] == generic[(i, i + 1)] for i in range(1, 4))

    htree, empty = hss_binary_tree(8)
    sizes = [0 if k in empty else 3 for k in htree.nodes]
    H = dense_random(htree, BlockLayout(sizes, sizes), seed=8)
    th = construct_tss(H)
    hss_ok = all(
        th.spinners[k].D.size == 0
        and all(v.size == 0 for v in th.spinners[k].Inp.values())
        and all(v.size == 0 for v in th.spinners[k].Out.values())
        for k in empty
    )
    leaves = sorted(htree.leaves)
    hss_ok &= all(np.allclose(block_entry(th, i, j), submatrix(H, (i,), (j,)), atol=1e-12) for i in leaves for j in leaves)
    hss_ok &= to_dense(th).shape == (24, 24)

    ok = sss_ok and zero_ok and hss_ok
    report(4, "special cases", ok, f"SSS pattern {sss_ok}, zero-rank placement {zero_ok}, HSS empty nodes {hss_ok}")
    assert ok


def test_criterion_5_girs(report):
    checked, violations, exhaustive = 0, 0, 0
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(500 + seed)
        K = int(rng.integers(3, 11)) if seed < 10 else int(rng.integers(11, 16))
        tree = random_tree(K, rng)
        layout = BlockLayout(rng.integers(1, 4, K), rng.integers(1, 4, K))
        profile = {e: int(rng.integers(0, 3)) for e in tree.directed_edges()}
        T = to_dense(random_tss(tree, layout, profile, seed))
        c = max(hankel_rank_profile(T).values())
        rep = verify_girs(T, c, trials=200, seed=seed)
        checked += rep.subsets_checked
        violations += len(rep.violations)
        exhaustive += rep.exhaustive
        if c:
            worst = max(worst, rep.max_ratio / c)
    ok = violations == 0 and exhaustive == 10
    report(5, "GIRS", ok, f"{violations} violations over {checked} subsets ({exhaustive} exhaustive trees), max rank/(c*edges) {worst:.2f}")
    assert ok


def test_criterion_6_algebra(report):
    bad_sum = bad_prod = 0
    for seed in range(20):
        tree, layout = _tree_and_layout(600 + seed, 3, 12, 3, square=True)
        rng = np.random.default_rng(seed)
        pa = {e: int(rng.integers(0, 3)) for e in tree.directed_edges()}
        pb = {e: int(rng.integers(0, 3)) for e in tree.directed_edges()}
        a = construct_tss(to_dense(random_tss(tree, layout, pa, seed)))
        b = construct_tss(to_dense(random_tss(tree, layout, pb, seed + 50)))
        bound = profile_sum(a.profile, b.profile)
        bad_sum += not profile_leq(hankel_rank_profile(to_dense(add(a, b))), bound)
        bad_prod += not profile_leq(hankel_rank_profile(to_dense(multiply(a, b))), bound)

    bad_inv = 0
    for seed in range(20):
        tree, layout = _tree_and_layout(700 + seed, 3, 12, 3, square=True)
        T = well_conditioned_tss_dense(tree, list(layout.m), 2, seed)
        t = construct_tss(T)
        bad_inv += inverse(t).profile != t.profile
    ok = bad_sum == bad_prod == bad_inv == 0
    report(6, "algebra", ok, f"sum bound failures {bad_sum}/20, product {bad_prod}/20, inverse profile mismatches {bad_inv}/20")
    assert ok


def _heap_tree(K):
    return build_rooted_tree(K, [(i, i // 2) for i in range(2, K + 1)], 1)


def _affine_spread(sizes, counts):
    slopes = np.diff(counts) / np.diff(sizes)
    return float(np.max(np.abs(slopes - slopes.mean())) / slopes.mean())


def test_criterion_7_matvec(report):
    worst = 0.0
    for seed in range(100):
        tree, layout = _tree_and_layout(800 + seed, 2, 31, 4)
        rng = np.random.default_rng(seed)
        profile = {e: int(rng.integers(0, 4)) for e in tree.directed_edges()}
        t = random_tss(tree, layout, profile, seed)
        x = rng.standard_normal(layout.N)
        ref = to_dense(t).values @ x
        worst = max(worst, np.linalg.norm(matvec(t, x) - ref) / np.linalg.norm(ref))

    sizes = [8, 16, 32, 64]
    spreads = {}
    for name, make in (("line", line_tree), ("binary", _heap_tree)):
        counts = []
        for K in sizes:
            tree = make(K)
            counts.append(matvec_opcount(random_tss(tree, BlockLayout.uniform(K, 3), uniform_profile(tree, 2), 0)))
        spreads[name] = _affine_spread(sizes, counts)
    ok = worst <= 1e-12 and max(spreads.values()) <= 0.2
    detail = ", ".join(f"{k} slope spread {v:.1%}" for k, v in spreads.items())
    report(7, "matvec oracle", ok, f"max rel err {worst:.2e} over 100 triples; {detail}")
    assert ok


def test_criterion_8_solve(report):
    worst = 0.0
    lifted = fill_free = 0
    for seed in range(50):
        tree, layout = _tree_and_layout(900 + seed, 2, 25, 3, square=True)
        T = well_conditioned_tss_dense(tree, list(layout.m), 2, seed)
        t = construct_tss(T)
        b = np.random.default_rng(seed).standard_normal(layout.N)
        ref = dense_solve(T.values, b)
        try:
            sol = solve_lifted(assemble_lifted(t, b))
        except SingularPivotBlock:
            x = solve(t, b)
        else:
            x = sol.x
            lifted += 1
            fill_free += sol.fill_free(tree)
        worst = max(worst, np.linalg.norm(x - ref) / np.linalg.norm(ref))

    ts = singular_pivot_instance()
    bs = np.arange(1.0, 6.0)
    try:
        solve(ts, bs, fallback=False)
        raised = False
    except SingularPivotBlock:
        raised = True
    xs, info = solve(ts, bs, return_info=True)
    fallback_ok = raised and info.method == "dense" and np.allclose(to_dense(ts).values @ xs, bs, rtol=1e-10)

    ok = worst <= 1e-8 and fill_free == lifted and fallback_ok
    report(8, "solve oracle", ok, f"max rel err {worst:.2e}; no-fill on {fill_free}/{lifted} lifted solves; dense fallback exercised {fallback_ok}")
    assert ok


def test_criterion_9_tree_sparse_inverse(report):
    over = 0
    edges = 0
    for seed in range(20):
        tree, layout = _tree_and_layout(1100 + seed, 3, 20, 4, square=True)
        T = tree_sparse_inverse(tree, layout, seed)
        for e in tree.directed_edges():
            i, j = e
            bound = min(layout.m_of(i), layout.m_of(j))
            over += numerical_rank(unit_hankel(T, e), 1e-12) > bound
            edges += 1
    ok = over == 0
    report(9, "tree-sparse inverse", ok, f"{over} of {edges} unit-Hankel ranks exceed the coupling block size")
    assert ok
