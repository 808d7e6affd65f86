"""
Multi-robot kinodynamic motion planning with signal temporal logic
monitors, constrained Bayesian-optimization tree search and conflict-based
coordination.
"""

import logging

logger = logging.getLogger("STLcBOT")

__version__ = "0.1.0"

DT = 0.1
""" Sampling step of every signal, trajectory and plan in the package (seconds).
:type: float """
