"""Builds the optional compiled simulation kernels.

The package works without them (a pure-Python fallback is selected at
import time); compile with

    python setup.py build_ext --inplace

or let `pip install -e . --no-build-isolation` do it when Cython and a C
compiler are available.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tlmap.kernels._cloops",
                ["src/tlmap/kernels/_cloops.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
