"""Gabor frame analysis on exact rational grids.

Walnut-series assembly of the frame operator, summability diagnostics for
its convergence, Zak-domain matrix calculus for rational lattices, and a
finite cyclic oracle that cross-checks everything by brute force.
"""

__version__ = "0.1.0"
