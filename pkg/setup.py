"""Build the optional Cython kernels.

The extension is marked optional: if it fails to compile, the package still
installs and falls back to the numpy/scipy kernels at import time.
"""
import sys

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    openmp = [] if sys.platform == "darwin" else ["-fopenmp"]
    extensions = [
        Extension(
            "xxzladder._kernels",
            ["src/xxzladder/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"] + openmp,
            extra_link_args=openmp,
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            optional=True,
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
