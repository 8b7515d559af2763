import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# -O3 without -ffast-math: the kernels promise IEEE semantics and
# deterministic accumulation orders, which fast-math would break.
extensions = [
    Extension(
        "spcg.kernels._ckernels",
        ["src/spcg/kernels/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-fopenmp"],
        extra_link_args=["-fopenmp"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
