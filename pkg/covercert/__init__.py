"""Finite covers of triangulated 3-manifolds, Cayley-graph Cheeger cuts and cocycle certificates."""

__version__ = "0.1.0"
