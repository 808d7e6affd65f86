"""
Readers for the formula grammar and the JSON scenario and benchmark files.
"""
