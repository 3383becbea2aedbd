"""Curvature and dynamics of the centrally extended area-preserving algebra on the sphere."""
