"""Pure-numpy kernel backend.

Used when the compiled extension is unavailable. Work units run
sequentially but follow the same partitioning and accumulation contracts,
so determinism guarantees are identical to the compiled backend.
bincount accumulates in entry order, which matches the per-row sequential
reduction the contract specifies.
"""

from __future__ import annotations

import numpy as np

from .config import KernelConfig, pairwise_merge

name = "python"


def _cast(y: np.ndarray, dtype) -> np.ndarray:
    # bincount accumulates in float64; narrow afterwards for float32 inputs
    return y if y.dtype == dtype else y.astype(dtype)


def spmv_full(m, x: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    prod = m.values * x[m.col_idx]
    y = np.bincount(m.entry_rows, weights=prod, minlength=m.n)
    return _cast(y, m.dtype)


def _worker_entry_order(n_items: int, chunk: int, workers: int) -> list[np.ndarray]:
    """Entry indices each worker owns: chunk c goes to worker c mod workers,
    processed in ascending chunk order."""
    nchunks = -(-n_items // chunk) if n_items else 0
    out = []
    for w in range(workers):
        parts = [
            np.arange(c * chunk, min((c + 1) * chunk, n_items))
            for c in range(w, nchunks, workers)
        ]
        out.append(np.concatenate(parts) if parts else np.empty(0, dtype=np.int64))
    return out


def spmv_sym(s, x: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    # phase 1 (gather): y[i] = sum over stored row entries, conflict-free
    y = np.bincount(s.entry_rows, weights=s.values * x[s.col_idx], minlength=s.n)
    # phase 2 (scatter): y[j] += v * x[i] for strictly-lower (i, j, v)
    rows, cols, vals = s.strict_lower
    prod = vals * x[rows]
    if cfg.accumulation == "atomic":
        # summation order is unspecified for atomic mode; one pass is fine
        y += np.bincount(cols, weights=prod, minlength=s.n)
    else:
        chunk = cfg.resolve_chunk(rows.shape[0])
        for idx in _worker_entry_order(rows.shape[0], chunk, cfg.workers):
            y += np.bincount(cols[idx], weights=prod[idx], minlength=s.n)
    return _cast(y, s.dtype)


def dot(u: np.ndarray, v: np.ndarray, cfg: KernelConfig) -> float:
    m = u.shape[0]
    if m == 0:
        return 0.0
    chunk = cfg.resolve_chunk(m)
    starts = range(0, m, chunk)
    partials = np.array([np.dot(u[s : s + chunk], v[s : s + chunk]) for s in starts])
    return pairwise_merge(partials)


def axpy(alpha: float, u: np.ndarray, v: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    if alpha == 0.0:
        return v.copy()
    return v + u.dtype.type(alpha) * u
