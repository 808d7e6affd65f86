"""
Benchmark harness, reports and figures.
"""
