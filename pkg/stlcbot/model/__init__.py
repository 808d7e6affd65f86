"""
Formulas, signals, robot models, workspaces and scenarios.
"""
