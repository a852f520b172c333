"""Build script: compiles the optional Cython propagation kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed cythonize/compile is downgraded to a warning.
"""

import sys

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "ionres._core",
                ["src/ionres/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"warning: building without compiled kernel ({exc})", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
