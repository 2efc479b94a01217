"""Build the optional compiled grid kernels.

The extension is a performance core only: if Cython (or a C compiler) is
unavailable the package installs anyway and falls back to the pure-numpy
kernels in budgetlloyd._kernels.pykernels.

Floating-point flags matter here: no -ffast-math, and -ffp-contract=off, so
the compiled kernels are bit-identical to the numpy fallback.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "budgetlloyd._kernels._grid_core",
                sources=["src/budgetlloyd/_kernels/_grid_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
