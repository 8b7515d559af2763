"""Wrapper adapting matrix objects to the compiled OpenMP kernels."""

from __future__ import annotations

import numpy as np

from . import _ckernels
from .config import KernelConfig, pairwise_merge

name = "compiled"


def spmv_full(m, x: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    y = np.zeros(m.n, dtype=m.dtype)
    _ckernels.csr_gather(
        m.row_start, m.col_idx, m.values, x, y,
        cfg.workers, cfg.resolve_chunk(m.n),
    )
    return y


def spmv_sym(s, x: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    y = np.zeros(s.n, dtype=s.dtype)
    _ckernels.csr_gather(
        s.row_start, s.col_idx, s.values, x, y,
        cfg.workers, cfg.resolve_chunk(s.n),
    )
    rows, cols, vals = s.strict_lower
    chunk = cfg.resolve_chunk(rows.shape[0])
    if cfg.accumulation == "atomic":
        _ckernels.scatter_atomic(rows, cols, vals, x, y, cfg.workers, chunk)
    else:
        priv = np.zeros((cfg.workers, s.n), dtype=s.dtype)
        _ckernels.scatter_privatized(rows, cols, vals, x, y, priv, cfg.workers, chunk)
    return y


def dot(u: np.ndarray, v: np.ndarray, cfg: KernelConfig) -> float:
    m = u.shape[0]
    if m == 0:
        return 0.0
    chunk = cfg.resolve_chunk(m)
    nchunks = -(-m // chunk)
    partials = np.empty(nchunks, dtype=u.dtype)
    _ckernels.dot_partials(u, v, partials, cfg.workers, chunk)
    return pairwise_merge(partials)


def axpy(alpha: float, u: np.ndarray, v: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    if alpha == 0.0:
        return v.copy()
    out = np.empty_like(v)
    _ckernels.axpy_kernel(
        u.dtype.type(alpha), u, v, out,
        cfg.workers, cfg.resolve_chunk(u.shape[0]),
    )
    return out
