"""Build script for the optional compiled core.

The extension accelerates the scalar recurrence loops; if it cannot be
built the package transparently falls back to the pure-Python core, so
any build failure here is downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"skipping compiled core ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name} ({exc}); using pure-Python fallback")


# -ffp-contract=off: the pure-Python core must agree bit for bit with the
# compiled one; fused multiply-adds would change roundings.
ext = Extension(
    "rkstab._core",
    ["src/rkstab/_core.pyx"],
    extra_compile_args=["-O2", "-ffp-contract=off"],
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
