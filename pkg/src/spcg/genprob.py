"""Deterministic generators of SPD sparse systems.

Poisson stencils (5-point 2-D, 7-point 3-D) and seeded diagonally-dominant
random matrices serve as desk-scale stand-ins for large FEM systems. All
generators are pure functions of their arguments; random_spd draws from
numpy's default PCG64 stream seeded explicitly, so fixtures reproduce
bitwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import INDEX_DTYPE, CsrMatrix, build_csr_from_triplets

_N_LIMIT = 2**31  # index arrays stay well inside int64; memory guard


@dataclass(frozen=True)
class ProblemSpec:
    kind: str  # poisson2d | poisson3d | random_spd
    dims: tuple[int, ...]
    density: float = 0.05  # random_spd only
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("poisson2d", "poisson3d", "random_spd"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if any(d < 1 for d in self.dims):
            raise ValueError("extents must be >= 1")
        if not (0 < self.density <= 1):
            raise ValueError("density must be in (0, 1]")


def generate(spec: ProblemSpec, dtype=np.float64) -> CsrMatrix:
    if spec.kind == "poisson2d":
        return poisson2d(*spec.dims, dtype=dtype)
    if spec.kind == "poisson3d":
        return poisson3d(*spec.dims, dtype=dtype)
    return random_spd(spec.dims[0], spec.density, spec.seed, dtype=dtype)


def _check_n(n: int):
    if n >= _N_LIMIT:
        raise OverflowError(f"grid of {n} points exceeds the supported size")


def poisson2d(nx: int, ny: int, dtype=np.float64) -> CsrMatrix:
    """5-point Laplacian on an nx-by-ny grid: 4 on the diagonal, -1 per
    grid neighbor. SPD with nnz = n + 2*(nx*(ny-1) + ny*(nx-1))."""
    if nx < 1 or ny < 1:
        raise ValueError("extents must be >= 1")
    n = nx * ny
    _check_n(n)
    idx = np.arange(n, dtype=INDEX_DTYPE)
    ix, iy = idx % nx, idx // nx
    rows = [idx]
    cols = [idx]
    vals = [np.full(n, 4.0)]
    right = idx[ix < nx - 1]
    down = idx[iy < ny - 1]
    for a, b in ((right, right + 1), (down, down + nx)):
        rows += [a, b]
        cols += [b, a]
        vals += [np.full(a.shape[0], -1.0)] * 2
    return build_csr_from_triplets(
        (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)), n, dtype=dtype
    )


def poisson3d(nx: int, ny: int, nz: int, dtype=np.float64) -> CsrMatrix:
    """7-point Laplacian on an nx-by-ny-by-nz grid, diagonal 6."""
    if min(nx, ny, nz) < 1:
        raise ValueError("extents must be >= 1")
    n = nx * ny * nz
    _check_n(n)
    idx = np.arange(n, dtype=INDEX_DTYPE)
    ix = idx % nx
    iy = (idx // nx) % ny
    iz = idx // (nx * ny)
    rows = [idx]
    cols = [idx]
    vals = [np.full(n, 6.0)]
    for mask, step in ((ix < nx - 1, 1), (iy < ny - 1, nx), (iz < nz - 1, nx * ny)):
        a = idx[mask]
        rows += [a, a + step]
        cols += [a + step, a]
        vals += [np.full(a.shape[0], -1.0)] * 2
    return build_csr_from_triplets(
        (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)), n, dtype=dtype
    )


def random_spd(n: int, density: float, seed: int, dtype=np.float64) -> CsrMatrix:
    """Strictly diagonally dominant symmetric matrix, hence SPD.

    A seeded PCG64 stream picks a symmetric off-diagonal pattern with
    values in [-1, 0); each diagonal is the absolute row sum plus 1, so
    every Gershgorin disc sits in the positive half-line.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    max_pairs = n * (n - 1) // 2
    m = min(max_pairs, int(round(density * n * n / 2)))
    if m > 0:
        pair_ids = rng.choice(max_pairs, size=m, replace=False)
        # enumerate strictly-lower pairs row by row: row i holds ids
        # [i*(i-1)/2, i*(i+1)/2)
        i = np.floor((1 + np.sqrt(1 + 8 * pair_ids.astype(np.float64))) / 2).astype(INDEX_DTYPE)
        # float sqrt can land one row off; fix up exactly
        i = np.where(i * (i - 1) // 2 > pair_ids, i - 1, i)
        i = np.where((i + 1) * i // 2 <= pair_ids, i + 1, i)
        j = (pair_ids - i * (i - 1) // 2).astype(INDEX_DTYPE)
        v = rng.uniform(-1.0, 0.0, size=m)
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        vals = np.concatenate([v, v])
    else:
        rows = np.empty(0, dtype=INDEX_DTYPE)
        cols = np.empty(0, dtype=INDEX_DTYPE)
        vals = np.empty(0)
    diag = np.bincount(rows, weights=np.abs(vals), minlength=n) + 1.0
    rows = np.concatenate([rows, np.arange(n, dtype=INDEX_DTYPE)])
    cols = np.concatenate([cols, np.arange(n, dtype=INDEX_DTYPE)])
    vals = np.concatenate([vals, diag])
    return build_csr_from_triplets((rows, cols, vals), n, dtype=dtype)
