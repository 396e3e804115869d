"""Build script for the optional compiled kernel extension.

The package works without the extension: taas.kernels falls back to the
pure-Python implementation when taas._kernels_c cannot be imported.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "taas._kernels_c",
                ["src/taas/_kernels_c.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
