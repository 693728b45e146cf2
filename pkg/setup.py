"""Build script.

The package is pure Python; a small optional Cython extension accelerates the
dense mod-p row reduction used by the randomized oracle.  If Cython (or a C
compiler) is unavailable the build silently falls back to the pure-Python
implementation in ``loopcrystal._linalg``.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/loopcrystal/_rowreduce.pyx"],
        language_level=3,
    )
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
