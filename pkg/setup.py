"""Build the optional compiled simulation kernels.

The package works without them: ``logitmeta.sim`` falls back to pure Python
when the extension is missing.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("logitmeta.sim._ckernels", ["src/logitmeta/sim/_ckernels.pyx"], extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
