"""
Gaussian-process surrogates and the constrained acquisition stack.
"""
