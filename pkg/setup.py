import sys

import numpy as np
from setuptools import setup

# The belief-propagation kernel is optional: the package falls back to the
# pure-numpy decoder at import time if the extension is absent.
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "mamimo.ldpc._bp_cython",
                ["src/mamimo/ldpc/_bp_cython.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    print("Cython not available; building without the compiled BP kernel", file=sys.stderr)
    extensions = []

setup(ext_modules=extensions)
