"""spcg: parallel sparse conjugate-gradient solver and benchmark toolkit.

Full-CSR and symmetric-half (L+D) storage, a two-phase symmetric SpMV
with atomic or privatized scatter accumulation, the CG iteration built on
those kernels, SPD problem generators, and Matrix Market / .spcg file I/O.
"""

from .core import (
    CsrMatrix,
    SymHalfMatrix,
    ValidationReport,
    build_csr_from_triplets,
    expand_symmetric,
    extract_lower,
    is_symmetric,
    validate_csr,
)
from .kernels import KernelConfig, axpy, dot, norm2, spmv_full, spmv_sym
from .solver import CgOptions, SolveReport, cg_solve, check_convergence

__version__ = "0.1.0"

__all__ = [
    "CsrMatrix",
    "SymHalfMatrix",
    "ValidationReport",
    "build_csr_from_triplets",
    "validate_csr",
    "is_symmetric",
    "extract_lower",
    "expand_symmetric",
    "KernelConfig",
    "spmv_full",
    "spmv_sym",
    "dot",
    "axpy",
    "norm2",
    "CgOptions",
    "SolveReport",
    "cg_solve",
    "check_convergence",
    "__version__",
]
