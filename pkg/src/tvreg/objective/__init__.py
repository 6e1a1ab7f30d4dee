"""Objectives over the unit box."""

from .base import SmoothObjective, gradient_map, local_mu, project_box
from .problem import ObjEval, TvRegProblem, phi_value_grad, theory_params
from .quadratic import BoxQuadratic, random_box_quadratic

__all__ = [
    "BoxQuadratic",
    "ObjEval",
    "SmoothObjective",
    "TvRegProblem",
    "gradient_map",
    "local_mu",
    "phi_value_grad",
    "project_box",
    "random_box_quadratic",
    "theory_params",
]
