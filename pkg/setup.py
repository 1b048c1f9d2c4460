"""Build script: compiles the optional edit-distance extension.

The extension is a pure speedup; if Cython or a C compiler is missing the
package installs anyway and falls back to the pure-Python kernel at import.
Set TOKENWEAVE_NO_EXTENSION=1 to skip the compile step entirely.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TOKENWEAVE_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/tokenweave/kernels/_levenshtein.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
