"""Convergence analysis."""

from .analyzer import SUBOPT_FLOOR, ConvergenceAnalyzer, fit_log_linear, relative_suboptimality

__all__ = ["SUBOPT_FLOOR", "ConvergenceAnalyzer", "fit_log_linear", "relative_suboptimality"]
