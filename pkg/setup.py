"""Build hook for the optional compiled core.

The package works without it: ``seqmns._backend`` falls back to the numpy
kernels in ``seqmns/_core_py.py`` when ``seqmns._core`` cannot be imported.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("seqmns._core", ["src/seqmns/_core.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
