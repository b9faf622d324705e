import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CHAINTRUST_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/chaintrust/_kernels/_score_cy.pyx",
            compiler_directives={"language_level": "3"},
            include_path=[np.get_include()],
        )
    except ImportError:
        # Pure-Python kernel is selected at import when the extension is absent.
        ext_modules = []

setup(ext_modules=ext_modules)
