# -*- coding: utf-8 -*-
#
# PySTLcBOT documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys
import os

sys.path.insert(0, os.path.abspath(".."))

# -- General configuration -----------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.mathjax",
    "sphinx.ext.todo",
]

# Include TODOs in docs
todo_include_todos = True

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = u"PySTLcBOT"
copyright = u"2026, PySTLcBOT authors and contributors"

version = ""
for aline in open("../stlcbot/__init__.py"):
    # space here is important since __version__ is used in generation of
    # version_info also
    if "__version__ =" in aline:
        version = aline.split('"')[1]
release = version

exclude_patterns = ["_build"]
pygments_style = "sphinx"

# Members are documented in source order, which follows the data flow of
# each module.
autodoc_member_order = "bysource"

# -- Options for HTML output ---------------------------------------------------

html_theme = "nature"
html_static_path = ["_static"]
htmlhelp_basename = "pystlcbotdoc"

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {}
latex_documents = [
    (
        "index",
        "pystlcbot.tex",
        "PySTLcBOT Documentation",
        "PySTLcBOT authors and contributors",
        "manual",
    ),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ("index", "pystlcbot", "PySTLcBOT Documentation", ["PySTLcBOT authors and contributors"], 1)
]
