"""Build the optional Cython kernels; the package works without them."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("DWPOLES_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        extensions = [
            Extension(
                f"dwpoles.kernels.{name}",
                [f"src/dwpoles/kernels/{name}.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
            for name in ("_transfer", "_numerov")
        ]
        ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
