"""Build script: compiles the quaternion kernel extension when a toolchain
is available.  The package falls back to the pure-Python kernel at import
time, so a failed extension build is not fatal."""

from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cobord2._kernel._quatc",
                ["src/cobord2/_kernel/_quatc.pyx"],
                # keep sin/cos as separate libm calls so the compiled
                # kernel matches the pure backend bit for bit
                extra_compile_args=[
                    "-fno-builtin-sin",
                    "-fno-builtin-cos",
                    "-fno-builtin-sincos",
                    "-ffp-contract=off",
                ],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
