"""
qfbounds: hyperbolic geometry toolkit for boundary-separation bounds of convex
domains in quasi-Fuchsian manifolds.
"""

__version__ = "0.1.0"
