"""Build script for the optional compiled Pauli kernel.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures are downgraded to a warning instead
of failing the install.
"""

import warnings

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    extensions = cythonize(
        [
            Extension(
                "dacqc._kernels_cy",
                ["src/dacqc/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"compiled kernel disabled: {exc}")
    extensions = []

setup(ext_modules=extensions)
