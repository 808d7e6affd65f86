"""
Multi-robot coordination: conflicts, constraint-tree search and prioritized planning.
"""
