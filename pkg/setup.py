from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in torusword._kernels_py when the extension is
# missing (see torusword.kernels).
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "torusword._speedups",
                ["src/torusword/_speedups.pyx"],
                language="c++",
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
