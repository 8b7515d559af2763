"""File ingestion and emission.

Two formats: Matrix Market coordinate files (real, general or symmetric)
for interchange, and the `.spcg` binary container packing a matrix with
its right-hand side and an optional reference solution.

The `.spcg` layout is little-endian: magic "SPCG", version u32 = 1,
flags u32 (bit 0: symmetric-half storage, bit 1: x_ref present), n u64,
nnz u64, then row_start as u64[n+1], col_idx as u32[nnz], values, b and
optionally x_ref as float64 arrays.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    INDEX_DTYPE,
    CsrMatrix,
    MissingDiagonalError,
    SymHalfMatrix,
    as_vector,
    build_csr_from_triplets,
)

MAGIC = b"SPCG"
VERSION = 1
_FLAG_SYM = 1
_FLAG_XREF = 2
_HEADER = struct.Struct("<4sIIQQ")


class FileFormatError(ValueError):
    """Malformed or truncated input file."""


class UnsupportedFormatError(FileFormatError):
    """Recognized family but unsupported variant (complex, pattern, array)."""


@dataclass(frozen=True)
class LinearSystem:
    matrix: CsrMatrix | SymHalfMatrix
    b: np.ndarray
    x_ref: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "b", as_vector(self.b, self.matrix.n))
        if self.x_ref is not None:
            object.__setattr__(self, "x_ref", as_vector(self.x_ref, self.matrix.n))


# ---------------------------------------------------------------- Matrix Market


def read_matrix_market(path) -> CsrMatrix | SymHalfMatrix:
    """Parse a coordinate real Matrix Market file.

    `general` yields a CsrMatrix; `symmetric` yields a SymHalfMatrix from
    the stored lower triangle. File indices are 1-based and converted
    here; duplicates are summed.
    """
    path = Path(path)
    with open(path) as fh:
        banner = fh.readline()
        tokens = banner.strip().lower().split()
        if len(tokens) != 5 or tokens[0] != "%%matrixmarket":
            raise FileFormatError(f"{path}: not a Matrix Market file")
        _, obj, fmt, field_kind, symmetry = tokens
        if (obj, fmt) != ("matrix", "coordinate") or field_kind != "real":
            raise UnsupportedFormatError(
                f"{path}: only 'matrix coordinate real' is supported, got {banner.strip()!r}"
            )
        if symmetry not in ("general", "symmetric"):
            raise UnsupportedFormatError(f"{path}: unsupported symmetry {symmetry!r}")

        lineno = 1
        size = None
        for line in fh:
            lineno += 1
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            size = line.split()
            break
        if size is None or len(size) != 3:
            raise FileFormatError(f"{path}:{lineno}: missing or malformed size line")
        nrows, ncols, nnz = (int(t) for t in size)
        if nrows != ncols:
            raise FileFormatError(f"{path}:{lineno}: matrix is {nrows}x{ncols}, not square")
        if nrows == 0:
            raise FileFormatError(f"{path}:{lineno}: degenerate 0x0 matrix")
        n = nrows

        rows = np.empty(nnz, dtype=INDEX_DTYPE)
        cols = np.empty(nnz, dtype=INDEX_DTYPE)
        vals = np.empty(nnz, dtype=np.float64)
        k = 0
        for line in fh:
            lineno += 1
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise FileFormatError(f"{path}:{lineno}: expected 'row col value'")
            if k >= nnz:
                raise FileFormatError(f"{path}:{lineno}: more entries than the declared {nnz}")
            try:
                i, j, v = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise FileFormatError(f"{path}:{lineno}: {exc}") from exc
            if not (1 <= i <= n and 1 <= j <= n):
                raise FileFormatError(f"{path}:{lineno}: index ({i}, {j}) outside 1..{n}")
            if symmetry == "symmetric" and j > i:
                raise FileFormatError(
                    f"{path}:{lineno}: entry ({i}, {j}) above the diagonal in a symmetric file"
                )
            rows[k], cols[k], vals[k] = i - 1, j - 1, v
            k += 1
        if k != nnz:
            raise FileFormatError(f"{path}: declared {nnz} entries, found {k}")

    m = build_csr_from_triplets((rows, cols, vals), n)
    if symmetry == "general":
        return m
    try:
        return SymHalfMatrix(n=n, row_start=m.row_start, col_idx=m.col_idx, values=m.values)
    except MissingDiagonalError as exc:
        raise FileFormatError(f"{path}: {exc}") from exc


def write_matrix_market(m: CsrMatrix | SymHalfMatrix, path) -> None:
    """Emit coordinate real format, 1-based, 17 significant digits
    (round-trip exact for doubles)."""
    symmetry = "symmetric" if isinstance(m, SymHalfMatrix) else "general"
    rows = m.entry_rows
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix coordinate real {symmetry}\n")
        fh.write(f"{m.n} {m.n} {m.nnz}\n")
        for i, j, v in zip(rows, m.col_idx, m.values):
            fh.write(f"{i + 1} {j + 1} {v:.17g}\n")


# ---------------------------------------------------------------- .spcg container


def write_system(system: LinearSystem, path) -> None:
    m = system.matrix
    flags = 0
    if isinstance(m, SymHalfMatrix):
        flags |= _FLAG_SYM
    if system.x_ref is not None:
        flags |= _FLAG_XREF
    if m.nnz and int(m.col_idx.max()) >= 2**32:
        raise FileFormatError("matrix too large for u32 column indices")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, flags, m.n, m.nnz))
        fh.write(m.row_start.astype("<u8").tobytes())
        fh.write(m.col_idx.astype("<u4").tobytes())
        fh.write(np.asarray(m.values, dtype="<f8").tobytes())
        fh.write(np.asarray(system.b, dtype="<f8").tobytes())
        if system.x_ref is not None:
            fh.write(np.asarray(system.x_ref, dtype="<f8").tobytes())


def read_system(path) -> LinearSystem:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise FileFormatError(f"{path}: truncated header")
    magic, version, flags, n, nnz = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FileFormatError(f"{path}: unsupported version {version}")
    has_xref = bool(flags & _FLAG_XREF)
    expected = (
        _HEADER.size
        + 8 * (n + 1)
        + 4 * nnz
        + 8 * nnz
        + 8 * n
        + (8 * n if has_xref else 0)
    )
    if len(blob) != expected:
        raise FileFormatError(f"{path}: expected {expected} bytes, found {len(blob)}")

    off = _HEADER.size
    row_start = np.frombuffer(blob, dtype="<u8", count=n + 1, offset=off).astype(INDEX_DTYPE)
    off += 8 * (n + 1)
    col_idx = np.frombuffer(blob, dtype="<u4", count=nnz, offset=off).astype(INDEX_DTYPE)
    off += 4 * nnz
    values = np.frombuffer(blob, dtype="<f8", count=nnz, offset=off).copy()
    off += 8 * nnz
    b = np.frombuffer(blob, dtype="<f8", count=n, offset=off).copy()
    off += 8 * n
    x_ref = np.frombuffer(blob, dtype="<f8", count=n, offset=off).copy() if has_xref else None

    if row_start[0] != 0 or row_start[-1] != nnz or np.any(np.diff(row_start) < 0):
        raise FileFormatError(f"{path}: inconsistent row offsets")
    cls = SymHalfMatrix if flags & _FLAG_SYM else CsrMatrix
    matrix = cls(n=n, row_start=row_start, col_idx=col_idx, values=values)
    return LinearSystem(matrix=matrix, b=b, x_ref=x_ref)


# ---------------------------------------------------------------- dispatch helpers


def sniff_format(path, override: str | None = None) -> str:
    """'spcg' or 'mtx', from the override or the file extension."""
    if override:
        if override not in ("spcg", "mtx"):
            raise FileFormatError(f"unknown format {override!r}")
        return override
    suffix = Path(path).suffix.lower()
    if suffix == ".spcg":
        return "spcg"
    if suffix in (".mtx", ".mm"):
        return "mtx"
    raise FileFormatError(f"cannot infer format of {path!r}; pass an explicit format")
