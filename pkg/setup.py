"""Build script for the compiled kernel extension.

The package works without the extension (a pure NumPy fallback is selected at
import time), so a failed compile only costs speed. -ffp-contract=off keeps the
compiled arithmetic bit-identical to the pure backend: fused multiply-adds would
otherwise produce slightly different floats than NumPy's separate mul/add.
"""

from setuptools import setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/rewardbound/_kernels/_ckernels.pyx"],
        compiler_directives={"language_level": "3"},
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
