"""Builds the compiled core as a python extension.

The CMake build remains the primary one for the C++ library, tests, and the
command-line tool; this file exists so `pip install` can produce the python
package on its own (use --no-build-isolation so the preinstalled pybind11 is
picked up).
"""

import glob
import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# setuptools requires /-separated paths relative to this file.
HERE = os.path.dirname(os.path.abspath(__file__))
os.chdir(HERE)

EIGEN_CANDIDATES = ["/usr/include/eigen3", "/usr/local/include/eigen3"]
eigen = next((p for p in EIGEN_CANDIDATES if os.path.isdir(p)), None)
include_dirs = ["include", "vendor"]
if eigen:
    include_dirs.append(eigen)

ext = Pybind11Extension(
    "lpdyn._lpdyn",
    sources=sorted(glob.glob("src/*.cpp")) + ["bindings/pymodule.cpp"],
    include_dirs=include_dirs,
    libraries=["gmpxx", "gmp"],
    cxx_std=20,
)

setup(
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
