# Configuration file for the Sphinx documentation builder.

import os
import sys
from datetime import datetime
from pathlib import Path

import toml  # make sure that toml is a developer dependency

sys.path.insert(0, os.path.abspath("."))
sys.path.insert(0, os.path.abspath("../"))

project = "canreal"
copyright = f"{datetime.now().year}, Canreal developers"  # pylint: disable=redefined-builtin
author = "Canreal developers"

metadata = toml.load(Path(__file__).parent.parent / "pyproject.toml")["tool"]["poetry"]
version_long = metadata["version"]
version = ".".join(version_long.split(".")[0:3])
release = version_long
rst_epilog = f".. |VERSION| replace:: {version_long}"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
language = None
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
htmlhelp_basename = "canrealdoc"

man_pages = [(master_doc, "canreal", "canreal Documentation", [author], 1)]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
}
