"""Numerical core: vectors, smooth maps, tangent bundles and dynamics."""
