"""Difference operator and smoothed total variation."""

from .difference import D_NORM_SQ_BOUND, DiffOperator, apply_D, apply_D_t
from .huber import TvEval, huber, huber_of_norms, tv_value_grad

__all__ = [
    "D_NORM_SQ_BOUND",
    "DiffOperator",
    "TvEval",
    "apply_D",
    "apply_D_t",
    "huber",
    "huber_of_norms",
    "tv_value_grad",
]
