"""Report generators for convergence histories and experiment summaries."""

from .history_reporter import (
    HISTORY_COLUMNS,
    MANIFEST_NAME,
    emit_gnuplot_dat,
    emit_history_csv,
    file_sha256,
    verify_manifest,
    write_manifest,
)
from .summary_reporter import SummaryReporter

__all__ = [
    "HISTORY_COLUMNS",
    "MANIFEST_NAME",
    "SummaryReporter",
    "emit_gnuplot_dat",
    "emit_history_csv",
    "file_sha256",
    "verify_manifest",
    "write_manifest",
]
