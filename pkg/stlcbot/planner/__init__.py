"""
Single-robot tree planners.
"""
