import os

from setuptools import setup

ext_modules = []
if os.environ.get("TORICMIRROR_PURE_PYTHON") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            Extension(
                "toricmirror._kernels",
                sources=["src/toricmirror/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            ),
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
