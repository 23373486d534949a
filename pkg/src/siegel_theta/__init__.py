"""Riemann theta functions on restricted domains of C^g x H_g.

Evaluation of theta series with characteristics, Siegel and Minkowski
reduction, polyhedral cones and tube domains, and theta-based projective
embeddings of polarized complex tori.
"""

__version__ = "0.1.0"
