"""Build script: compiles the optional contraction kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs speed.  Set ZXPIVOT_NO_EXT=1
to skip the extension build entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("ZXPIVOT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "zxpivot._contract._core",
                    sources=["src/zxpivot/_contract/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build-env dependent
        print(f"zxpivot: skipping compiled kernel ({exc}); numpy fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
