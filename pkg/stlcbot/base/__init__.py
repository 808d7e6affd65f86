"""
Base classes, errors and helpers shared by every sub-package.
"""
