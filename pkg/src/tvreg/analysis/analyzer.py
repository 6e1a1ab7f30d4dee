"""Convergence analysis of solver runs."""

import logging
from collections.abc import Sequence

import numpy as np
import pandas as pd

from ..models import LogLinearFit, RunRecord

logger = logging.getLogger(__name__)

# Relative suboptimality floor used for log plots and fits
SUBOPT_FLOOR = 1e-15


def relative_suboptimality(phi: np.ndarray, phi_star: float) -> np.ndarray:
    """(phi - phi*) / |phi*|, floored at 1e-15 (absolute gap when phi* = 0)."""
    scale = abs(phi_star) if phi_star != 0 else 1.0
    rel = (np.asarray(phi, dtype=np.float64) - phi_star) / scale
    return np.maximum(rel, SUBOPT_FLOOR)


def fit_log_linear(x: np.ndarray, y: np.ndarray) -> LogLinearFit:
    """Fit log10(y) = slope * x + intercept and report R^2."""
    x = np.asarray(x, dtype=np.float64)
    logy = np.log10(np.asarray(y, dtype=np.float64))
    if x.size < 2:
        raise ValueError("need at least two points for a fit")
    slope, intercept = np.polyfit(x, logy, 1)
    residual = logy - (slope * x + intercept)
    total = logy - logy.mean()
    ss_tot = float(total @ total)
    r_squared = 1.0 - float(residual @ residual) / ss_tot if ss_tot > 0 else 1.0
    return LogLinearFit(
        slope=float(slope), intercept=float(intercept), r_squared=r_squared, n_points=x.size
    )


class ConvergenceAnalyzer:
    """Derive iteration counts, rates and summary tables from run records."""

    def __init__(self, levels: Sequence[float] = (1e-2, 1e-4, 1e-6)):
        """
        Initialize the analyzer.

        Args:
            levels: Relative suboptimality levels reported in summaries
        """
        self.levels = tuple(levels)

    def rel_subopt(self, record: RunRecord) -> np.ndarray:
        phi = np.array([r.phi for r in record.history])
        return relative_suboptimality(phi, record.phi_star)

    def iterations_to_level(self, rel: np.ndarray, level: float) -> int | None:
        """First iteration whose relative suboptimality is at most ``level``."""
        hits = np.flatnonzero(np.asarray(rel) <= level)
        return int(hits[0]) if hits.size else None

    def tail_fit(self, rel: np.ndarray, fraction: float = 0.5) -> LogLinearFit | None:
        """
        Fit log10 suboptimality against k over the last ``fraction`` of the trace.

        Points at the floor are excluded, since they no longer carry rate information.
        """
        rel = np.asarray(rel)
        start = int(len(rel) * (1.0 - fraction))
        k = np.arange(start, len(rel))
        tail = rel[start:]
        mask = tail > SUBOPT_FLOOR
        if mask.sum() < 2:
            return None
        return fit_log_linear(k[mask], tail[mask])

    def growth_exponent(self, conditions: Sequence[float], counts: Sequence[float]) -> float:
        """Slope of log(count) against log(Q)."""
        slope, _ = np.polyfit(np.log(conditions), np.log(counts), 1)
        return float(slope)

    def summarize(self, records: Sequence[RunRecord]) -> pd.DataFrame:
        """
        One row per run with final accuracy, costs and iterations to each level.

        Args:
            records: Completed runs

        Returns:
            DataFrame sorted as given
        """
        rows = []
        for record in records:
            rel = self.rel_subopt(record)
            last = record.history[-1]
            fit = self.tail_fit(rel)
            row = {
                "problem": record.problem,
                "alpha": record.alpha,
                "tau": record.tau,
                "algorithm": record.algorithm.value,
                "stop_reason": record.stop_reason.value,
                "iterations": record.iterations,
                "phi_final": last.phi,
                "rel_subopt_final": float(rel[-1]),
                "grad_map_norm_final": last.grad_map_norm,
                "restarts": len(record.restart_events),
                "fevals": last.fevals,
                "gevals": last.gevals,
                "tail_slope": fit.slope if fit else np.nan,
                "tail_r2": fit.r_squared if fit else np.nan,
            }
            for level in self.levels:
                row[f"iters_to_{level:g}"] = self.iterations_to_level(rel, level)
            rows.append(row)
        return pd.DataFrame(rows)
