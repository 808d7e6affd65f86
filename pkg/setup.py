# -*- coding: utf-8 -*-

from setuptools import setup

long_description = open("README.md").read()

import stlcbot

version = stlcbot.__version__

setup(
    name="PySTLcBOT",
    version=version,
    packages=[
        "stlcbot",
        "stlcbot.base",
        "stlcbot.model",
        "stlcbot.parser",
        "stlcbot.sim",
        "stlcbot.gp",
        "stlcbot.planner",
        "stlcbot.coord",
        "stlcbot.bench",
    ],
    scripts=["pystlcbot"],
    author="PySTLcBOT authors and contributors",
    description="Multi-robot kinodynamic planning with STL monitors, constrained Bayesian-optimization trees and conflict-based search",
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=["lxml", "numpy>=1.20", "scipy", "matplotlib"],
    python_requires=">=3.7",
    license="LGPL",
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU Lesser General Public License v3 (LGPLv3)",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering",
    ],
)
