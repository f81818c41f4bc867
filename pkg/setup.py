import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernel core is optional: without it the package falls back to
# the pure-Python reference implementation at import time.
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "actionsynth._kernels_cy",
                ["src/actionsynth/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
