"""Per-run convergence history files and the experiment manifest."""

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any

from ..analysis.analyzer import SUBOPT_FLOOR, relative_suboptimality
from ..models import RunRecord

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = [
    "iter",
    "phi",
    "rel_subopt",
    "grad_map_norm",
    "mu_k",
    "L_k",
    "restarts",
    "fevals",
    "gevals",
    "wall_s",
]

MANIFEST_NAME = "manifest.json"


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _history_rows(record: RunRecord) -> list[list[str]]:
    rel = relative_suboptimality([r.phi for r in record.history], record.phi_star)
    return [
        [
            str(r.iter),
            _fmt(r.phi),
            _fmt(s),
            _fmt(r.grad_map_norm),
            _fmt(r.mu_k),
            _fmt(r.L_k),
            str(r.restarts),
            str(r.fevals),
            str(r.gevals),
            _fmt(r.wall_s),
        ]
        for r, s in zip(record.history, rel)
    ]


def emit_history_csv(record: RunRecord, path: Path | str) -> Path:
    """
    Write the convergence history of one run as CSV.

    Floats carry 17 significant digits, so the same record always produces the
    same bytes.

    Args:
        record: Completed run
        path: Output file

    Returns:
        Path to the written file
    """
    if not record.history:
        raise ValueError("cannot emit an empty history")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HISTORY_COLUMNS)
        writer.writerows(_history_rows(record))
    logger.debug(f"History CSV written to {path}")
    return path


def emit_gnuplot_dat(record: RunRecord, path: Path | str) -> Path:
    """Write the same history as whitespace-separated columns with a '#' header."""
    if not record.history:
        raise ValueError("cannot emit an empty history")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = [
        f"# problem={record.problem} algorithm={record.algorithm.value} "
        f"alpha={_fmt(record.alpha)} tau={_fmt(record.tau)}",
        f"# phi_star={_fmt(record.phi_star)} stop_reason={record.stop_reason.value}",
        f"# rel_subopt = (phi - phi_star) / |phi_star|, values below {SUBOPT_FLOOR:g} "
        f"are floored at {SUBOPT_FLOOR:g}",
        "# " + " ".join(HISTORY_COLUMNS),
    ]
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(header) + "\n")
        for row in _history_rows(record):
            f.write(" ".join(row) + "\n")
    logger.debug(f"Gnuplot data written to {path}")
    return path


def file_sha256(path: Path | str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(
    out_dir: Path | str,
    files: list[Path],
    config: dict[str, Any] | None = None,
    reference_violations: dict[str, float] | None = None,
) -> Path:
    """
    List every emitted file with its SHA-256 in ``manifest.json``.

    Args:
        out_dir: Experiment output directory; paths are stored relative to it
        files: Files to hash
        config: Experiment configuration snapshot
        reference_violations: Relative excess of the reference value over the best
            logged value, per run whose reference was not a lower bound

    Returns:
        Path to the manifest
    """
    out_dir = Path(out_dir)
    entries = {
        Path(p).resolve().relative_to(out_dir.resolve()).as_posix(): file_sha256(p)
        for p in files
    }
    manifest = {
        "config": config or {},
        "files": dict(sorted(entries.items())),
        "reference_violations": reference_violations or {},
    }
    if reference_violations:
        logger.warning(f"{len(reference_violations)} runs fall below their reference value")
    path = out_dir / MANIFEST_NAME
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Manifest with {len(entries)} files written to {path}")
    return path


def verify_manifest(path: Path | str) -> list[str]:
    """Return the manifest entries whose file is missing or whose hash differs."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        manifest = json.load(f)
    mismatched = []
    for name, digest in manifest["files"].items():
        target = path.parent / name
        if not target.exists() or file_sha256(target) != digest:
            mismatched.append(name)
    return mismatched
