"""Build shim for the optional compiled kernels.

The package is pure Python plus one Cython extension. The extension is
marked optional: if it fails to build, the install still succeeds and the
package falls back to the pure-Python kernels at import time.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext = Extension(
        "pairtrade._kernels",
        ["src/pairtrade/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off: no fused multiply-add, so the compiled kernels
        # produce bit-identical results to the pure-Python fallback
        extra_compile_args=["-O3", "-ffp-contract=off"],
        optional=True,
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
