from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "cyclenum._core",
        ["src/cyclenum/_core.pyx"],
        include_dirs=["src/cyclenum"],
        depends=["src/cyclenum/native/core.hpp"],
        language="c++",
        extra_compile_args=["-O3", "-std=c++17", "-pthread"],
        extra_link_args=["-pthread"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
