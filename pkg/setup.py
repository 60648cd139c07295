"""Build script for the optional compiled kernel extension.

The package works without the extension: indexcoding.kernels falls back to
the numpy reference implementation when the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False


def get_extensions():
    if not HAVE_CYTHON:
        return []
    ext = Extension(
        "indexcoding.kernels._kernels",
        ["src/indexcoding/kernels/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=get_extensions())
