# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel backend: OpenMP-parallel CSR SpMV, symmetric two-phase
SpMV, and BLAS-1 primitives with deterministic accumulation contracts."""

from cython.parallel cimport prange

import numpy as np

ctypedef fused real:
    float
    double

ctypedef long long idx_t


cdef extern from *:
    """
    static void spcg_atomic_add_d(double* a, double v) {
        #pragma omp atomic
        *a += v;
    }
    static void spcg_atomic_add_f(float* a, float v) {
        #pragma omp atomic
        *a += v;
    }
    """
    void spcg_atomic_add_d(double* a, double v) nogil
    void spcg_atomic_add_f(float* a, float v) nogil


def csr_gather(const idx_t[::1] row_start, const idx_t[::1] col_idx,
               const real[::1] values, const real[::1] x, real[::1] y,
               int workers, int chunk):
    """y[i] = sum_k values[k] * x[col_idx[k]] over row i's entries.

    Each row is one sequential reduction, so the result is bitwise
    independent of workers and chunk.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t i, k
    cdef real acc
    for i in prange(n, nogil=True, num_threads=workers,
                    schedule='static', chunksize=chunk):
        acc = 0
        for k in range(row_start[i], row_start[i + 1]):
            acc = acc + values[k] * x[col_idx[k]]
        y[i] = acc


def scatter_atomic(const idx_t[::1] rows, const idx_t[::1] cols,
                   const real[::1] vals, const real[::1] x, real[::1] y,
                   int workers, int chunk):
    """y[cols[k]] += vals[k] * x[rows[k]] with indivisible adds; the
    summation order across work units is unspecified."""
    cdef Py_ssize_t m = vals.shape[0]
    cdef Py_ssize_t k
    for k in prange(m, nogil=True, num_threads=workers,
                    schedule='static', chunksize=chunk):
        if real is double:
            spcg_atomic_add_d(&y[cols[k]], vals[k] * x[rows[k]])
        else:
            spcg_atomic_add_f(&y[cols[k]], vals[k] * x[rows[k]])


def scatter_privatized(const idx_t[::1] rows, const idx_t[::1] cols,
                       const real[::1] vals, const real[::1] x,
                       real[::1] y, real[:, ::1] priv,
                       int workers, int chunk):
    """Scatter with worker-private outputs merged in fixed worker order.

    Chunk c of entries belongs to worker c mod workers regardless of which
    thread executes it, so the result is bitwise reproducible for a fixed
    (workers, chunk).
    """
    cdef Py_ssize_t m = vals.shape[0]
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t nchunks = (m + chunk - 1) // chunk if m > 0 else 0
    cdef Py_ssize_t w, c, k, lo, hi, j
    for w in prange(workers, nogil=True, num_threads=workers, schedule='static'):
        c = w
        while c < nchunks:
            lo = c * chunk
            hi = lo + chunk
            if hi > m:
                hi = m
            for k in range(lo, hi):
                priv[w, cols[k]] += vals[k] * x[rows[k]]
            c = c + workers
    for w in range(workers):
        for j in range(n):
            y[j] += priv[w, j]


def dot_partials(const real[::1] u, const real[::1] v, real[::1] part,
                 int workers, int chunk):
    """Sequential partial sum per chunk, written to part[chunk_index]."""
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t nchunks = part.shape[0]
    cdef Py_ssize_t c, k, hi
    cdef real acc
    for c in prange(nchunks, nogil=True, num_threads=workers, schedule='static'):
        acc = 0
        hi = (c + 1) * chunk
        if hi > m:
            hi = m
        for k in range(c * chunk, hi):
            acc = acc + u[k] * v[k]
        part[c] = acc


def axpy_kernel(real alpha, const real[::1] u, const real[::1] v,
                real[::1] out, int workers, int chunk):
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t i
    for i in prange(m, nogil=True, num_threads=workers,
                    schedule='static', chunksize=chunk):
        out[i] = v[i] + alpha * u[i]
