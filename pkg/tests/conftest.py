import numpy as np
import pytest

from spcg import kernels
from spcg.core import INDEX_DTYPE, CsrMatrix, build_csr_from_triplets


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run the test under each kernel backend that built on this machine."""
    previous = kernels.get_backend()
    kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(previous)


def dense_spmv_oracle(dense: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Independent triple-loop SpMV, kept free of any library kernel."""
    n = dense.shape[0]
    y = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += dense[i, j] * x[j]
        y[i] = acc
    return y


def random_csr(rng: np.random.Generator, n: int, density: float) -> CsrMatrix:
    """Random (generally asymmetric) valid CSR matrix."""
    m = max(1, int(round(density * n * n)))
    rows = rng.integers(0, n, size=m).astype(INDEX_DTYPE)
    cols = rng.integers(0, n, size=m).astype(INDEX_DTYPE)
    vals = rng.standard_normal(m)
    return build_csr_from_triplets((rows, cols, vals), n)


def rel_inf_err(y: np.ndarray, ref: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(ref))))
    return float(np.max(np.abs(y - ref))) / scale
