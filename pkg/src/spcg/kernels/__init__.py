"""Parallel computational kernels: full-CSR SpMV, two-phase symmetric SpMV,
and the BLAS-1 operations the CG loop consumes.

Two backends implement the same contracts: a compiled OpenMP extension
(built at install time) and a pure-numpy fallback. The compiled one is
selected at import when available; override with the SPCG_BACKEND
environment variable ("compiled" or "python") or set_backend().
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..core import CsrMatrix, SymHalfMatrix
from .config import ACCUMULATION_MODES, KernelConfig, pairwise_merge
from . import _pykernels

BACKENDS = {"python": _pykernels}
try:
    from . import _compiled

    BACKENDS["compiled"] = _compiled
except ImportError:  # extension not built; fall back to numpy
    _compiled = None

_DEFAULT_CFG = KernelConfig()


def available_backends() -> tuple[str, ...]:
    return tuple(BACKENDS)


def set_backend(name: str):
    global _active
    if name == "auto":
        name = "compiled" if "compiled" in BACKENDS else "python"
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = BACKENDS[name]
    return _active


def get_backend() -> str:
    return _active.name


_active = set_backend(os.environ.get("SPCG_BACKEND", "auto"))


def _vec(x, n: int, dtype) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=dtype)
    if x.ndim != 1 or x.shape[0] != n:
        raise ValueError(f"dimension mismatch: expected vector of length {n}, got shape {x.shape}")
    return x


def _float_vec(x) -> np.ndarray:
    x = np.ascontiguousarray(x)
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)
    return x


def spmv_full(m: CsrMatrix, x, cfg: KernelConfig | None = None) -> np.ndarray:
    """y = M @ x over full CSR storage; bitwise independent of cfg."""
    cfg = cfg or _DEFAULT_CFG
    return _active.spmv_full(m, _vec(x, m.n, m.dtype), cfg)


def spmv_sym(s: SymHalfMatrix, x, cfg: KernelConfig | None = None) -> np.ndarray:
    """y = (L+D) @ x + L^T @ x in two strictly sequenced phases.

    Phase 1 gathers over stored rows (conflict-free); phase 2 scatters
    every strictly-lower entry into y[col], accumulating per
    cfg.accumulation. Equals spmv_full on the expanded matrix up to
    floating-point reassociation.
    """
    cfg = cfg or _DEFAULT_CFG
    return _active.spmv_sym(s, _vec(x, s.n, s.dtype), cfg)


def dot(u, v, cfg: KernelConfig | None = None) -> float:
    """Inner product; chunk partial sums merged pairwise in fixed order."""
    cfg = cfg or _DEFAULT_CFG
    u = _float_vec(u)
    v = _vec(v, u.shape[0], u.dtype)
    return _active.dot(u, v, cfg)


def axpy(alpha: float, u, v, cfg: KernelConfig | None = None) -> np.ndarray:
    """v + alpha * u, elementwise; bitwise independent of cfg."""
    cfg = cfg or _DEFAULT_CFG
    u = _float_vec(u)
    v = _vec(v, u.shape[0], u.dtype)
    return _active.axpy(alpha, u, v, cfg)


def norm2(u, cfg: KernelConfig | None = None) -> float:
    """Euclidean norm via the deterministic dot reduction."""
    return math.sqrt(dot(u, u, cfg))


__all__ = [
    "KernelConfig",
    "ACCUMULATION_MODES",
    "pairwise_merge",
    "spmv_full",
    "spmv_sym",
    "dot",
    "axpy",
    "norm2",
    "set_backend",
    "get_backend",
    "available_backends",
    "BACKENDS",
]
