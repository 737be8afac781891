"""
orliczembed - Numerical checks for Orlicz norms, permutation averages and L1 embeddings
"""

__version__ = "0.1.0"
__author__ = "Olivier Mary"
