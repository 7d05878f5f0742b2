import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HOLBLOCK_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("holblock.sim._kernel", ["src/holblock/sim/_kernel.pyx"],
                       extra_compile_args=["-O3"])],
            language_level=3,
        )

setup(ext_modules=ext_modules)
