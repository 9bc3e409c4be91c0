"""
Solving ``T x = b`` through the lifted block-sparse system.

Treating the edge states as extra unknowns turns the state and output
equations into a sparse system ``Xi theta = beta`` whose block adjacency is
the tree itself:

* column group ``j`` holds ``x_j`` followed by the incoming states
  ``g_(i,j)`` for every neighbour ``i`` (ascending);
* row group ``i`` holds the output equation of node ``i`` followed by the
  state equations of the outgoing states ``g_(i,j)`` (ascending ``j``).

Nodes are eliminated leaves first. The diagonal block of a node is in
general rectangular; ``min(rows, cols)`` pivots are taken inside it with
complete pivoting confined to the node's own rows and columns, and whatever
is left over (extra equations or extra unknowns) is handed to the parent's
group. All Schur updates therefore land in blocks ``(j, j)``, ``(j, i)`` or
``(i, j)`` for a tree edge ``{i, j}``; no fill appears elsewhere.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .apply import matvec
from .errors import LengthMismatch, NotSquare, SingularMatrix, SingularPivotBlock
from .tss import to_dense

DEFAULT_PIVOT_TOL = 1e-10


@dataclass
class LiftedSystem:
    """
    Block-sparse lifted system.

    ``blocks[(a, b)]`` is the dense block coupling row group ``a`` to
    column group ``b``; only ``a == b`` and tree edges appear. Row and column
    ids are global scalar indices; ``col_labels[c]`` is ``("x", j, k)`` or
    ``("g", (i, j), k)`` naming the ``k``-th entry of that unknown.
    """

    tree: object
    row_ids: dict
    col_ids: dict
    blocks: dict
    rhs: dict
    col_labels: list
    n_rows: int
    n_cols: int

    def pattern(self):
        """Pairs of node groups with a structurally present block."""
        return set(self.blocks)

    def to_dense(self):
        """Assemble ``Xi`` and ``beta`` densely (for checks only)."""
        Xi = np.zeros((self.n_rows, self.n_cols))
        beta = np.zeros(self.n_rows)
        for (a, b), blk in self.blocks.items():
            Xi[np.ix_(self.row_ids[a], self.col_ids[b])] = blk
        for a, r in self.rhs.items():
            beta[self.row_ids[a]] = r
        return Xi, beta


def _unknown_layout(t, j):
    """``[("x", j, n_j), ("g", (i, j), rho)]`` entries of column group ``j``."""
    items = [(("x", j), t.layout.n_of(j))]
    items += [(("g", (i, j)), t.profile[(i, j)]) for i in t.tree.neighbors(j)]
    return items


def assemble_lifted(t, b):
    """
    Build the lifted system for ``T x = b``.

    The output equation ``sum_i Out^j_i g_(i,j) + D^j x_j = b_j`` sits in row
    group ``j``; the state equation
    ``g_(i,j) - sum_w Trans^i_(j,w) g_(w,i) - Inp^i_j x_i = 0`` sits in row
    group ``i``.
    """
    tree, layout = t.tree, t.layout
    if layout.M != layout.N:
        raise NotSquare(f"matrix is {layout.M} x {layout.N}")
    b = np.asarray(b, dtype=float)
    if b.shape != (layout.M,):
        raise LengthMismatch(f"b has shape {b.shape}, expected ({layout.M},)")
    bs = layout.split_rows(b)
    sp = t.spinners
    rho = t.profile

    col_ids, col_pos, col_labels = {}, {}, []
    for j in tree.nodes:
        ids, start = [], 0
        for label, size in _unknown_layout(t, j):
            col_pos[label] = (start, size)
            ids.extend(range(len(col_labels), len(col_labels) + size))
            col_labels.extend((label[0], label[1], k) for k in range(size))
            start += size
        col_ids[j] = np.array(ids, dtype=int)

    row_ids, blocks, rhs = {}, {}, {}
    n_rows = 0
    for i in tree.nodes:
        nbrs = tree.neighbors(i)
        ncols = col_ids[i].size
        out_rows = layout.m_of(i)
        state_rows = [rho[(i, j)] for j in nbrs]
        nr = out_rows + sum(state_rows)
        row_ids[i] = np.arange(n_rows, n_rows + nr)
        n_rows += nr

        A = np.zeros((nr, ncols))
        x0, nx = col_pos[("x", i)]
        A[:out_rows, x0:x0 + nx] = sp[i].D
        for w in nbrs:
            g0, ng = col_pos[("g", (w, i))]
            A[:out_rows, g0:g0 + ng] = sp[i].Out[w]
        r0 = out_rows
        for j, nrj in zip(nbrs, state_rows):
            A[r0:r0 + nrj, x0:x0 + nx] = -sp[i].Inp[j]
            for w in nbrs:
                if w != j:
                    g0, ng = col_pos[("g", (w, i))]
                    A[r0:r0 + nrj, g0:g0 + ng] = -sp[i].Trans[(j, w)]
            # coupling into column group j: identity on g_(i,j)
            C = np.zeros((nr, col_ids[j].size))
            g0, ng = col_pos[("g", (i, j))]
            C[r0:r0 + nrj, g0:g0 + ng] = np.eye(nrj)
            blocks[(i, j)] = C
            r0 += nrj
        blocks[(i, i)] = A
        rhs[i] = np.concatenate([bs[i], np.zeros(nr - out_rows)])

    return LiftedSystem(tree, row_ids, col_ids, blocks, rhs, col_labels, n_rows, len(col_labels))


class _Counter:
    def __init__(self):
        self.ops = 0

    def mm(self, a, b):
        self.ops += a.shape[0] * (a.shape[1] if a.ndim > 1 else 1) * (b.shape[1] if b.ndim > 1 else 1)
        return a @ b


def _equilibrate(A):
    """Row then column max-abs scalings ``dr``, ``dc`` so that ``dr A dc`` has unit-size rows and columns."""
    with np.errstate(divide="ignore"):
        dr = 1.0 / np.max(np.abs(A), axis=1, initial=0.0)
        dr[~np.isfinite(dr)] = 1.0
        dc = 1.0 / np.max(np.abs(A * dr[:, None]), axis=0, initial=0.0)
        dc[~np.isfinite(dc)] = 1.0
    return dr, dc


def _complete_pivots(A, k, pivot_tol, node):
    """
    Row and column orders whose leading ``k x k`` block is safely invertible.

    Gaussian elimination with complete pivoting restricted to the equilibrated
    block ``dr A dc``; fails if a pivot drops below ``pivot_tol`` times the
    largest scaled entry. Equilibrating first keeps the test blind to the
    arbitrary scale of the edge states.
    """
    r, c = A.shape
    rows, cols = np.arange(r), np.arange(c)
    dr, dc = _equilibrate(A)
    if k == 0:
        return rows, cols, dr, dc
    W = A * dr[:, None] * dc[None, :]
    scale = np.max(np.abs(W))
    for step in range(k):
        sub = np.abs(W[step:, step:])
        a, b = np.unravel_index(np.argmax(sub), sub.shape)
        if not sub[a, b] > pivot_tol * scale:
            raise SingularPivotBlock(node, f"pivot {step + 1} of {k} in block group of node {node} is numerically zero")
        a += step
        b += step
        W[[step, a]] = W[[a, step]]
        W[:, [step, b]] = W[:, [b, step]]
        rows[[step, a]] = rows[[a, step]]
        cols[[step, b]] = cols[[b, step]]
        W[step + 1:, step] /= W[step, step]
        W[step + 1:, step + 1:] -= np.outer(W[step + 1:, step], W[step, step + 1:])
    return rows, cols, dr, dc


def _scaled_solver(A, p, s, dr, dc):
    """``M -> A[p, s]^{-1} M`` through an LU of the equilibrated pivot block."""
    if not len(p):
        return lambda M: M[:0]
    lu = scipy.linalg.lu_factor(A[np.ix_(p, s)] * dr[p, None] * dc[None, s])
    rp, cs = dr[p], dc[s]

    def apply(M):
        if M.ndim == 1:
            return cs * scipy.linalg.lu_solve(lu, rp * M)
        return cs[:, None] * scipy.linalg.lu_solve(lu, rp[:, None] * M)

    return apply


def _pad(M, rows=0, cols=0):
    return np.pad(M, ((0, rows), (0, cols))) if rows or cols else M


@dataclass
class LiftedSolution:
    x: np.ndarray
    states: dict
    opcount: int
    # group pairs whose block was created or updated during elimination
    touched: set = field(default_factory=set)

    def fill_free(self, tree):
        allowed = {(a, a) for a in tree.nodes}
        allowed |= set(tree.directed_edges())
        return self.touched <= allowed


def solve_lifted(sys, pivot_tol=DEFAULT_PIVOT_TOL):
    """
    Solve the lifted system by block elimination along the tree.

    Raises
    ------
    SingularPivotBlock
        If some node's block has no acceptable pivot; the caller may fall
        back to a dense solve.
    """
    tree = sys.tree
    blocks = {k: v.copy() for k, v in sys.blocks.items()}
    rhs = {k: v.copy() for k, v in sys.rhs.items()}
    cols = {k: list(v) for k, v in sys.col_ids.items()}
    touched = set()
    cnt = _Counter()
    eliminated = []

    for i, j in tree.up_edges_bottom_up():
        A = blocks.pop((i, i))
        Aij = blocks.pop((i, j))
        Aji = blocks.pop((j, i))
        bi = rhs.pop(i)
        r, c = A.shape
        k = min(r, c)
        pr, pc, dr, dc = _complete_pivots(A, k, pivot_tol, i)
        cnt.ops += r * c * k
        p, q, s, tt = pr[:k], pr[k:], pc[:k], pc[k:]
        solve_k = _scaled_solver(A, p, s, dr, dc)
        Mb = solve_k(bi[p])
        Mt = solve_k(A[np.ix_(p, tt)])
        Mj = solve_k(Aij[p])
        cnt.ops += k ** 3 // 3 + k * k * (1 + tt.size + Aij.shape[1])

        As = Aji[:, s]
        Ajj = blocks[(j, j)] - cnt.mm(As, Mj)
        rhs[j] = rhs[j] - cnt.mm(As, Mb)
        touched.add((j, j))

        snapshot = np.array(cols[j], dtype=int)
        eliminated.append((np.array(cols[i])[s], np.array(cols[i])[tt], snapshot, Mb, Mt, Mj))

        others = [g for g in tree.neighbors(j) if (j, g) in blocks and g != j]
        if tt.size:
            # leftover unknowns of i join column group j
            Ajj = np.hstack([Ajj, Aji[:, tt] - cnt.mm(As, Mt)])
            cols[j].extend(np.array(cols[i])[tt].tolist())
            for g in others:
                blocks[(g, j)] = _pad(blocks[(g, j)], cols=tt.size)
                touched.add((g, j))
        if q.size:
            # leftover equations of i join row group j
            Aq = A[np.ix_(q, s)]
            Ajj = np.vstack([Ajj, Aij[q] - cnt.mm(Aq, Mj)])
            rhs[j] = np.concatenate([rhs[j], bi[q] - cnt.mm(Aq, Mb)])
            for g in others:
                blocks[(j, g)] = _pad(blocks[(j, g)], rows=q.size)
                touched.add((j, g))
        blocks[(j, j)] = Ajj

    root = tree.root
    A = blocks.pop((root, root))
    if A.shape[0] != A.shape[1]:
        raise SingularPivotBlock(root, f"root block is {A.shape[0]} x {A.shape[1]}")
    n = A.shape[0]
    pr, pc, dr, dc = _complete_pivots(A, n, pivot_tol, root)
    theta = np.zeros(sys.n_cols)
    if n:
        sol = _scaled_solver(A, pr, pc, dr, dc)(rhs.pop(root)[pr])
        cnt.ops += n ** 3 // 3 + n * n
        theta[np.array(cols[root])[pc]] = sol

    for s_ids, t_ids, j_ids, Mb, Mt, Mj in reversed(eliminated):
        if s_ids.size:
            theta[s_ids] = Mb - cnt.mm(Mt, theta[t_ids]) - cnt.mm(Mj, theta[j_ids])

    return _unpack(sys, theta, cnt.ops, touched)


def _unpack(sys, theta, ops, touched):
    xs, states = {}, {}
    for c, (kind, key, _) in enumerate(sys.col_labels):
        (xs if kind == "x" else states).setdefault(key, []).append(theta[c])
    tree = sys.tree
    x = np.concatenate([np.asarray(xs.get(j, []), dtype=float) for j in tree.nodes])
    states = {e: np.asarray(v, dtype=float) for e, v in states.items()}
    for e in tree.directed_edges():
        states.setdefault(e, np.zeros(0))
    return LiftedSolution(x, states, ops, touched)


def dense_solve(T, b):
    """LU with partial pivoting; raises :class:`SingularMatrix` on a zero pivot."""
    T = np.asarray(T, dtype=float)
    b = np.asarray(b, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise NotSquare(f"matrix has shape {T.shape}")
    if T.shape[0] == 0:
        return np.zeros(0)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(T, check_finite=True)
    d = np.abs(np.diag(lu))
    if d.min() <= T.shape[0] * np.finfo(float).eps * max(d.max(), np.finfo(float).tiny):
        raise SingularMatrix("matrix is numerically singular")
    return scipy.linalg.lu_solve((lu, piv), b)


@dataclass
class SolveInfo:
    method: str
    opcount: int = 0
    fill_free: bool = True
    reason: str = ""


def solve(t, b, fallback=True, pivot_tol=DEFAULT_PIVOT_TOL, return_info=False):
    """
    Solve ``T x = b`` for a square TSS matrix.

    Uses the lifted tree elimination; when block-confined pivoting fails and
    ``fallback`` is set, reconstructs ``T`` densely and solves with LU.
    """
    sys = assemble_lifted(t, b)
    try:
        sol = solve_lifted(sys, pivot_tol=pivot_tol)
        info = SolveInfo("lifted", sol.opcount, sol.fill_free(t.tree))
        x = sol.x
    except SingularPivotBlock as exc:
        if not fallback:
            raise
        x = dense_solve(to_dense(t).values, b)
        info = SolveInfo("dense", fill_free=False, reason=str(exc))
    return (x, info) if return_info else x


def lifted_states_residual(t, sol):
    """Largest mismatch between solved states and those recomputed by a forward matvec."""
    _, g = matvec(t, sol.x, return_states=True)
    return max((np.max(np.abs(g[e] - sol.states[e])) for e in g if g[e].size), default=0.0)
