"""Build script; the compiled kernel extension is optional.

If Cython or a C compiler is unavailable the extension is skipped and the
package falls back to the pure-numpy kernels at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "torusflow._kernels._native",
                ["src/torusflow/_kernels/_native.pyx"],
                optional=True,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
        quiet=True,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
