"""
Command-line interface.

    tss construct   --matrix T.csv --tree tree.json [--tol 1e-12] --out t.tss.json
    tss reconstruct --tss t.tss.json --out T.csv
    tss matvec      --tss t.tss.json --x x.csv --out b.csv
    tss solve       --tss t.tss.json --b b.csv --out x.csv [--fallback-dense]
    tss analyze     --matrix T.csv --tree tree.json [--girs-c C] [--trials N] [--seed S]
    tss generate    --kind KIND --tree tree.json [--block-size S] [--rank R] --seed S --out T.csv
    tss bench       --sizes 8,16,32,64 [--rank R] [--block-size S] [--shape line|binary|both]

Every failure exits nonzero and prints a JSON object ``{"error", "message"}``
on stderr.
"""

import argparse
import csv
import io as _io
import json
import sys
import time

import numpy as np

from . import generators
from .algebra import verify_girs
from .apply import matvec, matvec_opcount
from .blockmat import BlockLayout, GraphPartitionedMatrix
from .construct import construct_tss, hankel_rank_profile
from .errors import TssError
from .io import (
    read_json,
    read_matrix_csv,
    read_vector_csv,
    tree_from_json,
    tree_to_json,
    tss_from_json,
    tss_to_json,
    write_json,
    write_matrix_csv,
    write_vector_csv,
)
from .lowrank import DEFAULT_TOL
from .solve import assemble_lifted, solve, solve_lifted
from .tree import hss_binary_tree, line_tree
from .tss import to_dense


def _load_tree(arg):
    """Tree JSON path, or the shorthands ``line:K`` and ``hss:LEAVES`` (unit blocks)."""
    if arg.startswith("line:"):
        tree = line_tree(int(arg[5:]))
        return tree, BlockLayout.uniform(tree.K, 1)
    if arg.startswith("hss:"):
        tree, empty = hss_binary_tree(int(arg[4:]))
        sizes = [0 if k in empty else 1 for k in tree.nodes]
        return tree, BlockLayout(sizes, sizes)
    return tree_from_json(read_json(arg))


def _load_matrix(args):
    tree, layout = _load_tree(args.tree)
    values = read_matrix_csv(args.matrix, (layout.M, layout.N))
    return GraphPartitionedMatrix(values, layout, tree)


def _emit(data, out, fmt="json"):
    if fmt == "json":
        text = json.dumps(data, indent=1) + "\n"
    else:
        buf = _io.StringIO()
        rows = data if isinstance(data, list) else [data]
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _profile_json(profile):
    return [{"from": i, "to": j, "rho": r} for (i, j), r in sorted(profile.items())]


def cmd_construct(args):
    T = _load_matrix(args)
    t = construct_tss(T, args.tol)
    write_json(args.out, tss_to_json(t))


def cmd_reconstruct(args):
    t = tss_from_json(read_json(args.tss))
    write_matrix_csv(args.out, to_dense(t).values)


def cmd_matvec(args):
    t = tss_from_json(read_json(args.tss))
    write_vector_csv(args.out, matvec(t, read_vector_csv(args.x)))


def cmd_solve(args):
    t = tss_from_json(read_json(args.tss))
    x, info = solve(t, read_vector_csv(args.b), fallback=args.fallback_dense, return_info=True)
    write_vector_csv(args.out, x)
    if info.method != "lifted":
        print(json.dumps({"warning": "dense fallback used", "reason": info.reason}), file=sys.stderr)


def cmd_analyze(args):
    T = _load_matrix(args)
    profile = hankel_rank_profile(T, args.tol)
    c = args.girs_c if args.girs_c is not None else max(profile.values(), default=0)
    report = verify_girs(T, c, trials=args.trials, seed=args.seed, tol=args.tol)
    data = {"profile": _profile_json(profile)}
    data.update(report.to_dict())
    _emit(data, args.out)


def generate_matrix(kind, tree, layout, seed, rank=1):
    if kind == "tree-sparse-inverse":
        return generators.tree_sparse_inverse(tree, layout, seed)
    if kind == "random-tss-dense":
        return generators.random_tss_dense(tree, layout, rank, seed)
    if kind == "dense-random":
        return generators.dense_random(tree, layout, seed)
    raise ValueError(f"unknown kind {kind!r}")


def cmd_generate(args):
    tree, layout = _load_tree(args.tree)
    if args.block_size is not None:
        layout = BlockLayout(
            [0 if layout.m_of(k) == 0 else args.block_size for k in tree.nodes],
            [0 if layout.n_of(k) == 0 else args.block_size for k in tree.nodes],
        )
    T = generate_matrix(args.kind, tree, layout, args.seed, args.rank)
    write_matrix_csv(args.out, T.values)
    if args.tree_out:
        write_json(args.tree_out, tree_to_json(tree, layout))


def bench_trees(shape, K):
    if shape == "line":
        return line_tree(K)
    # balanced post-ordered binary tree with about K nodes, all nodes nonempty
    tree, _ = hss_binary_tree(max(2, (K + 1) // 2))
    return tree


def run_bench(sizes, rank, block_size, seed, shapes=("line", "binary")):
    """Time construction, matvec and lifted solve on trees of the given sizes."""
    rows = []
    for shape in shapes:
        for K in sizes:
            tree = bench_trees(shape, K)
            T = generators.well_conditioned_tss_dense(tree, block_size, rank, seed)
            t0 = time.perf_counter()
            t = construct_tss(T)
            t1 = time.perf_counter()
            x = np.random.default_rng(seed).standard_normal(T.layout.N)
            b = matvec(t, x)
            t2 = time.perf_counter()
            sol = solve_lifted(assemble_lifted(t, b))
            t3 = time.perf_counter()
            rows.append(
                {
                    "shape": shape,
                    "K": tree.K,
                    "N": T.layout.N,
                    "max_rank": max(t.profile.values(), default=0),
                    "construct_s": t1 - t0,
                    "matvec_s": t2 - t1,
                    "solve_s": t3 - t2,
                    "matvec_ops": matvec_opcount(t),
                    "solve_ops": sol.opcount,
                    "solve_rel_err": float(np.linalg.norm(sol.x - x) / np.linalg.norm(x)),
                }
            )
    return rows


BENCH_FIELDS = ["shape", "K", "N", "max_rank", "construct_s", "matvec_s", "solve_s", "matvec_ops", "solve_ops", "solve_rel_err"]


def fit_slopes(rows):
    """Least-squares ``ops ~ slope * K + intercept`` per tree shape."""
    fits = {}
    for shape in dict.fromkeys(r["shape"] for r in rows):
        sel = [r for r in rows if r["shape"] == shape]
        if len(sel) < 2:
            continue
        K = np.array([r["K"] for r in sel], dtype=float)
        fits[shape] = {}
        for key in ("matvec_ops", "solve_ops"):
            y = np.array([r[key] for r in sel], dtype=float)
            slope, intercept = np.polyfit(K, y, 1)
            resid = np.max(np.abs(y - (slope * K + intercept)) / y)
            fits[shape][key] = {"slope": slope, "intercept": intercept, "max_rel_residual": resid}
    return fits


def cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()] if args.sizes else []
    shapes = ("line", "binary") if args.shape == "both" else (args.shape,)
    rows = run_bench(sizes, args.rank, args.block_size, args.seed, shapes)
    if args.format == "json":
        _emit({"rows": rows, "fits": fit_slopes(rows)}, args.out)
    elif not rows:
        _emit_text(",".join(BENCH_FIELDS) + "\n", args.out)
    else:
        _emit(rows, args.out, "csv")


def _emit_text(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser():
    p = argparse.ArgumentParser(prog="tss", description="Tree semi-separable matrices.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, description=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("construct", cmd_construct, "Convert a dense matrix to TSS form.")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--out", required=True)

    sp = add("reconstruct", cmd_reconstruct, "Write the dense matrix of a TSS file.")
    sp.add_argument("--tss", required=True)
    sp.add_argument("--out", required=True)

    sp = add("matvec", cmd_matvec, "Multiply a TSS matrix with a vector.")
    sp.add_argument("--tss", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--out", required=True)

    sp = add("solve", cmd_solve, "Solve T x = b with the lifted tree solver.")
    sp.add_argument("--tss", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument(
        "--fallback-dense",
        action="store_true",
        help="fall back to dense LU when block-confined pivoting fails",
    )

    sp = add("analyze", cmd_analyze, "Unit-Hankel rank profile and GIRS check of a dense matrix.")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--girs-c", type=float, default=None, help="GIRS constant (default: max edge rank)")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=["json"], default="json")

    sp = add(
        "generate",
        cmd_generate,
        "Generate a structured test matrix. tree-sparse-inverse inverts a matrix with random "
        "blocks on the diagonal and tree edges, shifted on the diagonal by "
        f"{generators.DOMINANCE_FACTOR:g} x (max absolute row sum) to guarantee invertibility.",
    )
    sp.add_argument("--kind", required=True, choices=["tree-sparse-inverse", "random-tss-dense", "dense-random"])
    sp.add_argument("--tree", required=True, help="tree JSON path, or line:K / hss:LEAVES")
    sp.add_argument("--block-size", type=int, default=None)
    sp.add_argument("--rank", type=int, default=1, help="edge rank for random-tss-dense")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--tree-out", default=None, help="also write the tree JSON used")

    sp = add(
        "bench",
        cmd_bench,
        "Time construct/matvec/solve and report op counts against K. "
        "JSON output adds an affine fit of the op counts per tree shape.",
    )
    sp.add_argument("--sizes", default="8,16,32,64")
    sp.add_argument("--rank", type=int, default=2)
    sp.add_argument("--block-size", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shape", choices=["line", "binary", "both"], default="both")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", default=None)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (TssError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        err = exc.to_dict() if isinstance(exc, TssError) else {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
