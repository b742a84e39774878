"""Build hook for the optional compiled kernels.

STACKYAB_NO_EXT=1 skips compilation; the package then runs on the
pure-numpy fallback in stackyab._kernels_py.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("STACKYAB_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "stackyab._speedups",
                    ["src/stackyab/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
