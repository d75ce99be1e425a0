"""Build the optional Cython kernels.

The package works without them; a failed or skipped build falls back to the
NumPy implementation at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

OPENMP = "-fopenmp"


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            print(f"warning: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
            return
        except Exception as exc:
            print(f"warning: OpenMP build of {ext.name} failed ({exc}); retrying serial")
        ext.extra_compile_args = [a for a in ext.extra_compile_args if a != OPENMP]
        ext.extra_link_args = [a for a in ext.extra_link_args if a != OPENMP]
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc})")


def extensions():
    if os.environ.get("CCMKDV_PURE_PYTHON", "") in ("1", "true", "yes"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "ccmkdv._ckernels",
        sources=["src/ccmkdv/_ckernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", OPENMP],
        extra_link_args=[OPENMP],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
