"""Builds the optional Cython kernels; the package works without them."""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("filiaut._kernels", ["src/filiaut/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except Exception:  # Cython missing or no compiler: pure-Python fallback
    ext_modules = []

setup(ext_modules=ext_modules)
