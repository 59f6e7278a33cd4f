"""Build script: compiles the hot physics kernel when Cython is available.

The package installs fine without a compiler; spincopter.core falls back to
the pure-Python kernel at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "spincopter._core",
                ["src/spincopter/_core.pyx"],
                # no -ffast-math: the fallback kernel must stay bit-identical,
                # and FMA contraction would break that.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
