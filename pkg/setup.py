"""Build script: compiles the optional Cython propagation kernel.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any build failure of the extension degrades
to a pure-Python install instead of aborting.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, otherwise install without it."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - build environment issue
            print(f"reflectra: skipping compiled kernel ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - build environment issue
            print(f"reflectra: skipping compiled kernel ({exc})", file=sys.stderr)


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:  # pragma: no cover - build environment issue
        return []
    return cythonize(
        [
            Extension(
                "reflectra._sweep",
                ["src/reflectra/_sweep.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
