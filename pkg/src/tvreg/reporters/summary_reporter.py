"""Experiment summaries as CSV and markdown."""

import logging
from collections.abc import Sequence
from datetime import datetime
from pathlib import Path

import pandas as pd

from ..analysis.analyzer import ConvergenceAnalyzer
from ..models import RunRecord

logger = logging.getLogger(__name__)


class SummaryReporter:
    """Generate summary tables for a finished experiment."""

    def __init__(self, analyzer: ConvergenceAnalyzer | None = None):
        self.analyzer = analyzer or ConvergenceAnalyzer()

    def frame(self, records: Sequence[RunRecord]) -> pd.DataFrame:
        return self.analyzer.summarize(records)

    def generate(self, records: Sequence[RunRecord], title: str = "Experiment") -> str:
        """
        Generate a markdown summary.

        Args:
            records: Completed runs
            title: Heading of the report

        Returns:
            Markdown formatted string
        """
        frame = self.frame(records)
        sections = [
            self._generate_header(records, title),
            self._generate_cells(frame),
            self._generate_restarts(records),
        ]
        return "\n\n".join(filter(None, sections)) + "\n"

    def _generate_header(self, records: Sequence[RunRecord], title: str) -> str:
        problems = sorted({r.problem for r in records})
        return f"""# Convergence Summary: {title}

**Problems:** {', '.join(problems) if problems else 'None'}

**Runs:** {len(records)}

---"""

    def _generate_cells(self, frame: pd.DataFrame) -> str:
        if frame.empty:
            return "No runs recorded."

        level_columns = [c for c in frame.columns if c.startswith("iters_to_")]
        lines = []
        for (alpha, tau), cell in frame.groupby(["alpha", "tau"], sort=False):
            lines.append(f"## alpha = {alpha:g}, tau = {tau:g}\n")
            headings = ["Solver", "Stop", "Iterations", "Final rel. subopt.", "f-evals", "g-evals"]
            headings += [c.replace("iters_to_", "k @ ") for c in level_columns]
            lines.append("| " + " | ".join(headings) + " |")
            lines.append("|" + "|".join("---" for _ in headings) + "|")
            for _, row in cell.iterrows():
                values = [
                    row["algorithm"],
                    row["stop_reason"],
                    str(row["iterations"]),
                    f"{row['rel_subopt_final']:.3e}",
                    str(row["fevals"]),
                    str(row["gevals"]),
                ]
                values += ["-" if pd.isna(row[c]) else str(int(row[c])) for c in level_columns]
                lines.append("| " + " | ".join(values) + " |")
            lines.append("")
        return "\n".join(lines).rstrip()

    def _generate_restarts(self, records: Sequence[RunRecord]) -> str:
        events = [(r, e) for r in records for e in r.restart_events]
        if not events:
            return ""
        lines = [
            "## Restarts",
            "",
            "| Solver | alpha | tau | Iteration | mu_k | new mu_bar | L_k |",
            "|---|---|---|---|---|---|---|",
        ]
        for record, event in events:
            lines.append(
                f"| {record.algorithm.value} | {record.alpha:g} | {record.tau:g} | {event.iter} "
                f"| {event.mu_k:.4e} | {event.mu_bar:.4e} | {event.L_k:.4e} |"
            )
        return "\n".join(lines)

    def save(self, records: Sequence[RunRecord], out_dir: Path | str, title: str = "Experiment") -> list[Path]:
        """
        Write ``summary.csv`` and ``summary.md`` into ``out_dir``.

        Returns:
            Paths of the written files
        """
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        csv_path = out_dir / "summary.csv"
        self.frame(records).to_csv(csv_path, index=False, float_format="%.17g", lineterminator="\n")

        md_path = out_dir / "summary.md"
        md_path.write_text(self.generate(records, title), encoding="utf-8")

        logger.info(f"Summary saved to {md_path} at {datetime.now():%H:%M:%S}")
        return [csv_path, md_path]
