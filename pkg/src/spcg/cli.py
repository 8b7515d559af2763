"""Command-line front end: generate, convert, solve, bench.

Exit codes: 0 success/converged, 1 usage error, 2 I/O or format error,
3 numerical breakdown or non-convergence.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import kernels
from .bench import run_bench
from .core import (
    AsymmetricMatrixError,
    CsrMatrix,
    MatrixConstructionError,
    MissingDiagonalError,
    SymHalfMatrix,
    expand_symmetric,
    extract_lower,
)
from .genprob import ProblemSpec, generate
from .kernels import KernelConfig
from .matio import (
    FileFormatError,
    LinearSystem,
    read_matrix_market,
    read_system,
    sniff_format,
    write_matrix_market,
    write_system,
)
from .solver import CgBreakdownError, CgOptions, cg_solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_any(path, fmt_override=None):
    """Returns (matrix_or_system, load_seconds)."""
    fmt = sniff_format(path, fmt_override)
    t0 = time.perf_counter()
    obj = read_system(path) if fmt == "spcg" else read_matrix_market(path)
    return obj, time.perf_counter() - t0


def _as_system(obj) -> LinearSystem:
    if isinstance(obj, LinearSystem):
        return obj
    raise FileFormatError(
        "input is a bare matrix; `solve` and `bench` need a .spcg system with a right-hand side"
    )


def _select_backend(name: str):
    if name != "auto" and name not in kernels.available_backends():
        raise UsageError(f"backend {name!r} not available (have: {kernels.available_backends()})")
    kernels.set_backend(name)


def cmd_gen(args) -> int:
    if args.poisson2d:
        spec = ProblemSpec("poisson2d", tuple(args.poisson2d), seed=args.seed)
    elif args.poisson3d:
        spec = ProblemSpec("poisson3d", tuple(args.poisson3d), seed=args.seed)
    elif args.random_spd:
        n, density = args.random_spd
        spec = ProblemSpec("random_spd", (int(n),), density=density, seed=args.seed)
    else:
        raise UsageError("one of --poisson2d/--poisson3d/--random-spd is required")
    a = generate(spec)
    if args.storage == "sym":
        matrix = extract_lower(a)
    else:
        matrix = a
    rng = np.random.default_rng(spec.seed)
    x_ref = rng.standard_normal(a.n)
    b = kernels.spmv_full(a, x_ref)
    write_system(LinearSystem(matrix=matrix, b=b, x_ref=x_ref), args.out)
    print(f"n={a.n} nnz={a.nnz} stored={matrix.nnz} storage={args.storage} -> {args.out}")
    return EXIT_OK


def cmd_convert(args) -> int:
    obj, _ = _read_any(args.input, args.in_format)
    matrix = obj.matrix if isinstance(obj, LinearSystem) else obj
    before = matrix.nnz

    if args.to == "sym":
        if isinstance(matrix, CsrMatrix):
            matrix = extract_lower(matrix)
    elif args.to == "full":
        if isinstance(matrix, SymHalfMatrix):
            matrix = expand_symmetric(matrix)
    print(f"stored entries: {before} -> {matrix.nnz}")

    if args.to == "mm":
        write_matrix_market(matrix, args.out)
    elif isinstance(obj, LinearSystem):
        write_system(LinearSystem(matrix=matrix, b=obj.b, x_ref=obj.x_ref), args.out)
    else:
        write_matrix_market(matrix, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    obj, load_s = _read_any(args.input, args.in_format)
    system = _as_system(obj)
    matrix = system.matrix
    if args.storage == "sym" and isinstance(matrix, CsrMatrix):
        matrix = extract_lower(matrix)
    elif args.storage == "full" and isinstance(matrix, SymHalfMatrix):
        matrix = expand_symmetric(matrix)

    cfg = KernelConfig(workers=args.workers, accumulation=args.accum)
    opts = CgOptions(tol=args.tol, max_iter=args.max_iter)
    t0 = time.perf_counter()
    report = cg_solve(matrix, system.b, opts=opts, cfg=cfg)
    wall = time.perf_counter() - t0

    print(f"load time: {load_s * 1e3:.3f}ms")
    print(f"iterations: {report.iterations}")
    print(f"final relative residual: {report.final_relative_residual:.6e}")
    print(f"solve time: {wall * 1e3:.3f}ms")
    if system.x_ref is not None:
        err = float(np.max(np.abs(report.x - system.x_ref)))
        print(f"inf-norm error vs reference solution: {err:.6e}")
    if not report.converged:
        print("not converged", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.reps < 3:
        raise UsageError("--reps must be >= 3")
    try:
        workers_list = sorted({int(w) for w in args.workers.split(",")})
    except ValueError:
        raise UsageError(f"bad --workers list {args.workers!r}")
    if any(w < 1 for w in workers_list):
        raise UsageError("worker counts must be >= 1")

    obj, load_s = _read_any(args.input, args.in_format)
    system = _as_system(obj)
    backends = list(kernels.available_backends()) if args.backend == "both" else [args.backend]
    previous = kernels.get_backend()
    try:
        for backend in backends:
            _select_backend(backend)
            report = run_bench(
                system,
                workers_list=workers_list,
                reps=args.reps,
                accumulation=args.accum,
                tol=args.tol,
                max_iter=args.max_iter,
                load_time_ms=load_s * 1e3,
            )
            if args.format == "json":
                print(report.to_json())
            elif args.format == "csv":
                print(report.to_csv(), end="")
            else:
                print(report.to_text(), end="")
    finally:
        kernels.set_backend(previous)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="spcg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an SPD system and write a .spcg file")
    p.add_argument("--poisson2d", nargs=2, type=int, metavar=("NX", "NY"))
    p.add_argument("--poisson3d", nargs=3, type=int, metavar=("NX", "NY", "NZ"))
    p.add_argument("--random-spd", nargs=2, type=float, metavar=("N", "DENSITY"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--storage", choices=["full", "sym"], default="full")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("convert", help="convert storage representation or file format")
    p.add_argument("input")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--to", choices=["full", "sym", "mm"], required=True)
    p.add_argument("--in-format", choices=["spcg", "mtx"])
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("solve", help="run the CG solver on a .spcg system")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--storage", choices=["full", "sym"], default="full")
    p.add_argument("--accum", choices=["atomic", "privatized"], default="privatized")
    p.add_argument("--backend", default="auto")
    p.add_argument("--in-format", choices=["spcg", "mtx"])
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("bench", help="per-operation and CG timing table")
    p.add_argument("input")
    p.add_argument("--workers", default="1", help="comma list, e.g. 1,2,4")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("--accum", choices=["atomic", "privatized"], default="atomic")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--backend", default="auto", help="auto, compiled, python, or both")
    p.add_argument("--in-format", choices=["spcg", "mtx"])
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "backend", None) and args.backend != "both":
            _select_backend(args.backend)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileFormatError, MatrixConstructionError, AsymmetricMatrixError,
            MissingDiagonalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CgBreakdownError as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
