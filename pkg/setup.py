"""Build script: compiles the optional mod-p linear algebra extension.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so the build must not fail on machines without a
C toolchain or Cython: the extension is marked optional and any build error
degrades to a warning.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/hamrep/_kernels.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.optional = True
        ext.extra_compile_args = ["-O2"]
except ImportError:  # pragma: no cover - exercised only on Cython-less hosts
    warnings.warn("Cython not available; installing with the pure-numpy kernels")

setup(ext_modules=ext_modules)
