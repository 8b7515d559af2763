"""Sparse storage formats: full CSR, symmetric-half CSR, and conversions.

A symmetric matrix A = L + D + L^T can be held as the CSR arrays of L + D
alone; the upper triangle is recovered implicitly through the transpose.
All matrix objects are immutable after construction and safe to share
across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

DEFAULT_SYMMETRY_TOL = 1e-12

INDEX_DTYPE = np.int64


class MatrixConstructionError(ValueError):
    """Raised when input data cannot form a valid sparse matrix."""


class AsymmetricMatrixError(ValueError):
    """Raised when an operation requiring symmetry gets an asymmetric matrix."""


class MissingDiagonalError(ValueError):
    """Raised when a symmetric-half matrix lacks a structural diagonal entry."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


def as_vector(data, n: int | None = None, dtype=None) -> np.ndarray:
    """Validate and return a contiguous 1-D real vector.

    Dense vectors throughout the library are plain numpy arrays; this is
    the boundary check (shape, finiteness, optional expected length).
    """
    v = np.ascontiguousarray(data, dtype=dtype)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.dtype not in (np.float32, np.float64):
        v = v.astype(np.float64)
    if n is not None and v.shape[0] != n:
        raise ValueError(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    return v


@dataclass(frozen=True)
class CsrMatrix:
    """Square sparse matrix in compressed-sparse-row form.

    row_start has length n+1 with row_start[0] == 0 and row_start[n] == nnz;
    within each row column indices are strictly increasing. Indices are
    0-based everywhere in memory; 1-based conversion happens only at file
    boundaries.
    """

    n: int
    row_start: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_start", _freeze(self.row_start.astype(INDEX_DTYPE, copy=False)))
        object.__setattr__(self, "col_idx", _freeze(self.col_idx.astype(INDEX_DTYPE, copy=False)))
        object.__setattr__(self, "values", _freeze(self.values))

    @property
    def nnz(self) -> int:
        return int(self.col_idx.shape[0])

    @property
    def dtype(self):
        return self.values.dtype

    @cached_property
    def entry_rows(self) -> np.ndarray:
        """Row index of every stored entry, in storage order."""
        return _freeze(np.repeat(np.arange(self.n, dtype=INDEX_DTYPE), np.diff(self.row_start)))

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=self.dtype)
        hit = self.entry_rows == self.col_idx
        d[self.entry_rows[hit]] = self.values[hit]
        return d

    def to_dense(self) -> np.ndarray:
        """Dense n x n copy. Test/oracle helper, not for large matrices."""
        a = np.zeros((self.n, self.n), dtype=self.dtype)
        a[self.entry_rows, self.col_idx] = self.values
        return a


@dataclass(frozen=True)
class SymHalfMatrix:
    """CSR storage of L + D for a symmetric matrix A = L + D + L^T.

    Every stored entry satisfies col <= row, and the diagonal entry is
    structurally present as the last entry of every row.
    """

    n: int
    row_start: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray
    diag_present: bool = field(default=True)

    def __post_init__(self):
        object.__setattr__(self, "row_start", _freeze(self.row_start.astype(INDEX_DTYPE, copy=False)))
        object.__setattr__(self, "col_idx", _freeze(self.col_idx.astype(INDEX_DTYPE, copy=False)))
        object.__setattr__(self, "values", _freeze(self.values))
        rows = self.entry_rows
        if np.any(self.col_idx > rows):
            raise MatrixConstructionError("symmetric-half storage requires col <= row for every entry")
        if self.n > 0 and self.col_idx.shape[0] < self.n:
            raise MissingDiagonalError("fewer stored entries than rows; some diagonal is missing")
        last = self.row_start[1:] - 1
        ok = (np.diff(self.row_start) > 0) & (self.col_idx[np.maximum(last, 0)] == np.arange(self.n))
        if not bool(np.all(ok)):
            bad = int(np.flatnonzero(~ok)[0])
            raise MissingDiagonalError(f"row {bad} has no stored diagonal entry")
        object.__setattr__(self, "diag_present", True)

    @property
    def nnz(self) -> int:
        return int(self.col_idx.shape[0])

    @property
    def dtype(self):
        return self.values.dtype

    @cached_property
    def entry_rows(self) -> np.ndarray:
        return _freeze(np.repeat(np.arange(self.n, dtype=INDEX_DTYPE), np.diff(self.row_start)))

    @cached_property
    def strict_lower(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, values) of the strictly-lower entries, storage order.

        This is what the scatter phase of the symmetric SpMV iterates over.
        """
        mask = self.col_idx < self.entry_rows
        return (
            _freeze(self.entry_rows[mask]),
            _freeze(self.col_idx[mask]),
            _freeze(self.values[mask]),
        )


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))
        assert self.ok == (len(self.violations) == 0)


def build_csr_from_triplets(triplets, n: int, dtype=np.float64, drop_zeros: bool = False) -> CsrMatrix:
    """Assemble a CsrMatrix from (row, col, value) triplets.

    Duplicate (row, col) pairs are summed (FEM assembly and Matrix Market
    both produce duplicates). Explicit zeros are retained unless
    drop_zeros is set.
    """
    if isinstance(triplets, tuple) and len(triplets) == 3 and isinstance(triplets[0], np.ndarray):
        rows, cols, vals = triplets
    elif len(triplets) == 0:
        rows = np.empty(0, dtype=INDEX_DTYPE)
        cols = np.empty(0, dtype=INDEX_DTYPE)
        vals = np.empty(0, dtype=dtype)
    else:
        rows, cols, vals = (np.asarray(a) for a in zip(*triplets))
    rows = rows.astype(INDEX_DTYPE, copy=False)
    cols = cols.astype(INDEX_DTYPE, copy=False)
    vals = np.asarray(vals, dtype=dtype)

    bad = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise MatrixConstructionError(
            f"triplet ({int(rows[k])}, {int(cols[k])}, {vals[k]!r}) is outside [0, {n})"
        )

    if rows.size:
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        key_new = np.empty(rows.size, dtype=bool)
        key_new[0] = True
        key_new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(key_new)
        if starts.size != rows.size:
            vals = np.add.reduceat(vals, starts)
            rows, cols = rows[starts], cols[starts]

    if drop_zeros and rows.size:
        keep = vals != 0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]

    row_start = np.zeros(n + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(rows, minlength=n), out=row_start[1:])
    return CsrMatrix(n=n, row_start=row_start, col_idx=cols, values=vals)


def validate_csr(m: CsrMatrix) -> ValidationReport:
    """Check every CSR invariant; violations are data, not exceptions."""
    v: list[tuple[str, int, int]] = []
    n, nnz = m.n, m.values.shape[0]
    if m.row_start.shape[0] != n + 1:
        v.append(("offsets-length", -1, -1))
        return ValidationReport(False, v)
    if m.row_start[0] != 0:
        v.append(("offsets-start", 0, 0))
    drs = np.diff(m.row_start)
    for i in np.flatnonzero(drs < 0):
        v.append(("offsets-monotone", int(i), -1))
    if m.row_start[n] != nnz:
        v.append(("offsets-end", n, -1))
    if m.col_idx.shape[0] != nnz:
        v.append(("arrays-length", -1, -1))
    oob = np.flatnonzero((m.col_idx < 0) | (m.col_idx >= n))
    for k in oob:
        v.append(("col-range", -1, int(k)))
    if not any(rule == "offsets-monotone" for rule, _, _ in v):
        for i in range(n):
            lo, hi = int(m.row_start[i]), int(m.row_start[i + 1])
            row_cols = m.col_idx[lo:hi]
            for p in np.flatnonzero(np.diff(row_cols) <= 0):
                v.append(("col-order", i, lo + int(p) + 1))
    return ValidationReport(len(v) == 0, v)


def _entry_keys(m: CsrMatrix) -> np.ndarray:
    return m.entry_rows * np.int64(m.n) + m.col_idx


def first_asymmetric_pair(m: CsrMatrix, tol: float = DEFAULT_SYMMETRY_TOL):
    """First (i, j) where A[i,j] and A[j,i] disagree beyond tolerance,
    or None when the matrix is symmetric.

    A stored (i, j, v) matches its mirror (j, i, w) when
    |v - w| <= tol * max(1, |v|); structurally absent mirrors count as 0.
    """
    keys = _entry_keys(m)
    order = np.lexsort((m.entry_rows, m.col_idx))
    keys_t = m.col_idx[order] * np.int64(m.n) + m.entry_rows[order]
    vals_t = m.values[order]
    union = np.union1d(keys, keys_t)
    a = np.zeros(union.shape[0], dtype=np.float64)
    b = np.zeros(union.shape[0], dtype=np.float64)
    a[np.searchsorted(union, keys)] = m.values
    b[np.searchsorted(union, keys_t)] = vals_t
    # per stored entry the bound is tol*max(1,|v|); checking both directions
    # makes the smaller magnitude the binding one
    bound = tol * np.maximum(1.0, np.minimum(np.abs(a), np.abs(b)))
    bad = np.flatnonzero(np.abs(a - b) > bound)
    if bad.size == 0:
        return None
    key = int(union[bad[0]])
    return key // m.n, key % m.n


def is_symmetric(m: CsrMatrix, tol: float = DEFAULT_SYMMETRY_TOL) -> bool:
    """True iff every stored entry matches its transpose mirror within
    tol * max(1, |v|); structural zeros are treated as value 0."""
    return first_asymmetric_pair(m, tol) is None


def extract_lower(m: CsrMatrix, tol: float = DEFAULT_SYMMETRY_TOL) -> SymHalfMatrix:
    """Keep the entries with col <= row of a symmetric matrix.

    Requires every diagonal entry to be structurally present; with a full
    diagonal the stored-entry count is exactly (nnz + n) / 2.
    """
    pair = first_asymmetric_pair(m, tol)
    if pair is not None:
        raise AsymmetricMatrixError(
            f"matrix is not symmetric: entries ({pair[0]}, {pair[1]}) and "
            f"({pair[1]}, {pair[0]}) disagree beyond tolerance"
        )
    rows = m.entry_rows
    diag_rows = np.bincount(rows[rows == m.col_idx], minlength=m.n)
    if np.any(diag_rows == 0):
        bad = int(np.flatnonzero(diag_rows == 0)[0])
        raise MissingDiagonalError(f"row {bad} has no stored diagonal entry")
    mask = m.col_idx <= rows
    counts = np.bincount(rows[mask], minlength=m.n)
    row_start = np.zeros(m.n + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=row_start[1:])
    return SymHalfMatrix(n=m.n, row_start=row_start, col_idx=m.col_idx[mask], values=m.values[mask])


def expand_symmetric(s: SymHalfMatrix) -> CsrMatrix:
    """Rebuild the full matrix A = L + D + L^T from half storage."""
    lr, lc, lv = s.strict_lower
    rows = np.concatenate([s.entry_rows, lc])
    cols = np.concatenate([s.col_idx, lr])
    vals = np.concatenate([s.values, lv])
    return build_csr_from_triplets((rows, cols, vals), s.n, dtype=s.dtype)
