from setuptools import Extension, setup
from Cython.Build import cythonize

# No -march=native and no -ffast-math: results must be bit-identical across
# machines and must match the NumPy fallback byte for byte. -ffp-contract=off
# stops the compiler from fusing a*b+c into FMA, which would round differently.
ext_modules = cythonize(
    [
        Extension(
            "detaug._kernels_c",
            ["src/detaug/_kernels_c.pyx"],
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ],
    compiler_directives={"language_level": "3"},
)

setup(ext_modules=ext_modules)
