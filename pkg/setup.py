"""Build script: compiles the optional C kernel extension when Cython and a
C compiler are available, and falls back to a pure-Python install otherwise.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("JRP_FORGE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "jrp_forge._kernels.fast",
                    ["src/jrp_forge/_kernels/fast.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
