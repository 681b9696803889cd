"""Build script with an optional compiled kernel extension.

The package is fully functional without a compiler: the Cython extension
`queryforge.kernels._native` accelerates the trigram-similarity and
token-window kernels, and `queryforge.kernels` falls back to the pure-Python
implementation when the extension is missing or fails to build.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to a warning instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing toolchain
            warnings.warn(f"native kernel build skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed, pure-Python kernels will be used: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "queryforge.kernels._native",
        ["src/queryforge/kernels/_native.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
