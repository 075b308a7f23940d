import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("GEOMOMENT_SKIP_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "geomoment._simplex_core",
                ["src/geomoment/_simplex_core.pyx"],
                # -ffp-contract=off keeps the compiled kernel bit-identical
                # to the numpy fallback (no fused multiply-adds).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
