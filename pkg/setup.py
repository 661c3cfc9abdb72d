"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension; a pure-Python
fallback is selected at import time when the compiled module is missing.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/synloc/_wl_cy.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False},
    )
    for ext in ext_modules:
        ext.optional = True
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
