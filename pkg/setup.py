"""Build script: compiles the optional Cython kernel core when a toolchain is
available, and falls back to the pure-Python twin otherwise."""

from setuptools import setup, Extension

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "equilibra._kernels._speedups",
        sources=["src/equilibra/_kernels/_speedups.pyx"],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    pass

setup(ext_modules=ext_modules)
