"""
Exact toolkit for self-dual free complexes over a local ring and the parity of psi
"""
__version__ = "1.0.0"
