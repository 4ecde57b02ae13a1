from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("steinercut._speedups", ["src/steinercut/_speedups.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-python kernels are selected at import time when the compiled
    # module is unavailable.
    ext_modules = []

setup(ext_modules=ext_modules)
