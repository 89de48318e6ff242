"""Build script for the compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so the build degrades to pure Python when no compiler or
Cython is available, or when ANALOGY_SEARCH_SKIP_EXT is set.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ANALOGY_SEARCH_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "analogy_search.kernels._ckernels",
                    ["src/analogy_search/kernels/_ckernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
