"""
Integration, monitoring and recorded plans.
"""
