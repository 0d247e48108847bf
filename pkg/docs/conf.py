# Sphinx configuration for the matrixcs documentation
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

# autodoc and sphinx-click import the package from the repository root
sys.path.insert(0, os.path.abspath("../"))

from matrixcs import __version__

project = "matrixcs"
copyright = "2026, the matrixcs developers"
author = "the matrixcs developers"
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
    "sphinx_rtd_theme",
    "numpydoc",
    "sphinx_click",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

numpydoc_show_class_members = False

html_theme = "sphinx_rtd_theme"
html_static_path = []
