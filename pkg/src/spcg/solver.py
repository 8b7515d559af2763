"""Conjugate gradient iteration over full-CSR or symmetric-half storage.

One SpMV per iteration (q = A p is reused for the step length and the
residual update), two dot products, three axpy updates. Convergence is
tested on the relative 2-norm of the recursive residual after the
r-update.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import CsrMatrix, SymHalfMatrix
from . import kernels
from .kernels import KernelConfig


class CgBreakdownError(RuntimeError):
    """Base for failures that abort the CG iteration."""


class NotPositiveDefiniteError(CgBreakdownError):
    """p'Ap <= 0 with a nonzero residual: matrix not positive definite."""


class NumericalBreakdownError(CgBreakdownError):
    """A non-finite alpha, beta, or residual appeared."""


@dataclass(frozen=True)
class CgOptions:
    tol: float = 1e-10
    max_iter: int | None = None  # defaults to n
    record_history: bool = False
    recompute_final_residual: bool = True

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class SolveReport:
    x: np.ndarray
    iterations: int
    converged: bool
    final_relative_residual: float
    residual_history: list[float] | None = None
    timings: dict[str, float] = field(default_factory=dict)


def check_convergence(residual_norm: float, b_norm: float, opts: CgOptions) -> bool:
    """True iff residual_norm <= tol * b_norm (b = 0 demands an exact zero)."""
    if b_norm == 0.0:
        return residual_norm == 0.0
    return residual_norm <= opts.tol * b_norm


def cg_solve(
    a: CsrMatrix | SymHalfMatrix,
    b,
    x0=None,
    opts: CgOptions | None = None,
    cfg: KernelConfig | None = None,
) -> SolveReport:
    """Solve A x = b for symmetric positive-definite A.

    A is not verified SPD up front; a non-positive p'Ap raises
    NotPositiveDefiniteError instead of silently diverging.
    """
    opts = opts or CgOptions()
    cfg = cfg or KernelConfig()
    if isinstance(a, SymHalfMatrix):
        spmv = kernels.spmv_sym
    elif isinstance(a, CsrMatrix):
        spmv = kernels.spmv_full
    else:
        raise TypeError(f"unsupported matrix type {type(a).__name__}")

    n = a.n
    b = np.ascontiguousarray(b, dtype=a.dtype)
    if b.shape != (n,):
        raise ValueError(f"dimension mismatch: b has shape {b.shape}, expected ({n},)")
    if x0 is None:
        x0 = np.zeros(n, dtype=a.dtype)
    else:
        x0 = np.ascontiguousarray(x0, dtype=a.dtype)
        if x0.shape != (n,):
            raise ValueError(f"dimension mismatch: x0 has shape {x0.shape}, expected ({n},)")
    max_iter = opts.max_iter if opts.max_iter is not None else max(1, n)

    timings = {"spmv": 0.0, "dot": 0.0, "axpy": 0.0, "total": 0.0}
    t_start = time.perf_counter()

    def timed(key, fn, *args):
        t0 = time.perf_counter()
        out = fn(*args)
        timings[key] += time.perf_counter() - t0
        return out

    b_norm = math.sqrt(timed("dot", kernels.dot, b, b, cfg))
    history: list[float] | None = [] if opts.record_history else None
    if b_norm == 0.0:
        timings["total"] = time.perf_counter() - t_start
        return SolveReport(
            x=np.zeros(n, dtype=a.dtype),
            iterations=0,
            converged=True,
            final_relative_residual=0.0,
            residual_history=history,
            timings=timings,
        )

    x = x0.copy()
    q0 = timed("spmv", spmv, a, x, cfg)
    r = timed("axpy", kernels.axpy, -1.0, q0, b, cfg)
    p = r.copy()
    rr = timed("dot", kernels.dot, r, r, cfg)

    converged = False
    iterations = 0
    rel = math.sqrt(rr) / b_norm
    if check_convergence(math.sqrt(rr), b_norm, opts):
        converged = True  # x0 already solves the system at tolerance
        max_iter = 0
    for k in range(1, max_iter + 1):
        q = timed("spmv", spmv, a, p, cfg)
        pq = timed("dot", kernels.dot, p, q, cfg)
        if pq <= 0.0:
            raise NotPositiveDefiniteError("matrix not positive definite")
        alpha = rr / pq
        if not math.isfinite(alpha):
            raise NumericalBreakdownError(f"non-finite alpha at iteration {k}")
        x = timed("axpy", kernels.axpy, alpha, p, x, cfg)
        r = timed("axpy", kernels.axpy, -alpha, q, r, cfg)
        rr_new = timed("dot", kernels.dot, r, r, cfg)
        rel = math.sqrt(rr_new) / b_norm
        if not math.isfinite(rel):
            raise NumericalBreakdownError(f"non-finite residual at iteration {k}")
        if history is not None:
            history.append(rel)
        iterations = k
        if check_convergence(math.sqrt(rr_new), b_norm, opts):
            converged = True
            rr = rr_new
            break
        beta = rr_new / rr
        if not math.isfinite(beta):
            raise NumericalBreakdownError(f"non-finite beta at iteration {k}")
        p = timed("axpy", kernels.axpy, beta, p, r, cfg)
        rr = rr_new

    if opts.recompute_final_residual:
        q = timed("spmv", spmv, a, x, cfg)
        true_r = timed("axpy", kernels.axpy, -1.0, q, b, cfg)
        rel = math.sqrt(timed("dot", kernels.dot, true_r, true_r, cfg)) / b_norm

    timings["total"] = time.perf_counter() - t_start
    return SolveReport(
        x=x,
        iterations=iterations,
        converged=converged,
        final_relative_residual=rel,
        residual_history=history,
        timings=timings,
    )
