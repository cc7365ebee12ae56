import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LOEWNERLAB_NO_EXT", "") in ("", "0"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("loewnerlab._kernel._ckernel",
                   ["src/loewnerlab/_kernel/_ckernel.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
