"""Nesterov's optimal method with unknown parameters for TV-regularized 3D tomography."""

__version__ = "0.1.0"
