"""
Report writers: JSON, aligned text tables and CSV plot data.

Everything written here is a deterministic function of the report, so
two runs with the same seed produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

from pydantic import BaseModel

from driveby_sentinel.models.reports import (
    BatchMonitorReport,
    EvalReport,
    GrowthReport,
    MetricRow,
    Verdict,
)

logger = logging.getLogger(__name__)

PLOT_HEADER = ("step", "algorithm", "variant", "precision", "recall", "f_measure")
GROWTH_HEADER = (
    "fraction",
    "n_traces",
    "n_malicious",
    "folds_used",
    "cv_f_measure",
    "unseen_f_measure",
)


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_json(report: BaseModel, path: str | Path) -> Path:
    """Report as indented JSON (timing fields left out)."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    exclude = {"inference_ms_per_snapshot"} if isinstance(report, EvalReport) else None
    target.write_text(report.model_dump_json(indent=2, exclude=exclude) + "\n", encoding="utf-8")
    logger.debug("Wrote %s", target)
    return target


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def plot_rows(rows: Iterable[MetricRow]) -> list[tuple[str, ...]]:
    """CSV rows ordered by algorithm, variant and step."""
    ordered = sorted(rows, key=lambda r: (r.algorithm, r.variant, r.upto_step))
    return [
        (
            str(r.upto_step),
            r.algorithm,
            r.variant,
            _fmt(r.precision),
            _fmt(r.recall),
            _fmt(r.f_measure),
        )
        for r in ordered
    ]


def write_plot_csv(rows: Iterable[MetricRow], path: str | Path) -> Path:
    """step,algorithm,variant,precision,recall,f_measure."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(_csv_text(PLOT_HEADER, plot_rows(rows)), encoding="utf-8")
    return target


def write_growth_csv(report: GrowthReport, path: str | Path) -> Path:
    """One line per sample fraction."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    rows = [
        (
            f"{r.fraction:g}",
            str(r.n_traces),
            str(r.n_malicious),
            "" if r.folds_used is None else str(r.folds_used),
            _fmt(r.cv_f_measure),
            _fmt(r.unseen_f_measure),
        )
        for r in report.rows
    ]
    target.write_text(_csv_text(GROWTH_HEADER, rows), encoding="utf-8")
    return target


def format_table(rows: Iterable[MetricRow], title: str | None = None) -> str:
    """Aligned text table of metric rows."""
    header = ("algorithm", "variant", "step", "precision", "recall", "F-measure", "tp/fp/tn/fn")
    body = [
        (
            r.algorithm,
            r.variant,
            str(r.upto_step),
            f"{r.precision:.4f}",
            f"{r.recall:.4f}",
            f"{r.f_measure:.4f}",
            f"{r.confusion.tp}/{r.confusion.fp}/{r.confusion.tn}/{r.confusion.fn}",
        )
        for r in sorted(rows, key=lambda r: (r.algorithm, r.variant, r.upto_step))
    ]
    widths = [max(len(cell) for cell in column) for column in zip(header, *body, strict=False)]
    lines = [title] if title else []
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths, strict=True)))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths, strict=True)) for row in body)
    return "\n".join(lines) + "\n"


def format_growth(report: GrowthReport) -> str:
    """Aligned text table of a growth study."""
    lines = [
        f"Growth study ({report.algorithm}, upto_step={report.upto_step}, seed={report.seed})",
        f"{'fraction':>9}  {'traces':>7}  {'malicious':>9}  {'folds':>5}  "
        f"{'CV F':>8}  {'unseen F':>8}",
    ]
    for r in report.rows:
        cv = "n/a" if r.cv_f_measure is None else f"{r.cv_f_measure:.4f}"
        folds = "-" if r.folds_used is None else str(r.folds_used)
        lines.append(
            f"{r.fraction:>9g}  {r.n_traces:>7}  {r.n_malicious:>9}  {folds:>5}  "
            f"{cv:>8}  {r.unseen_f_measure:>8.4f}"
        )
    return "\n".join(lines) + "\n"


def format_monitor(report: BatchMonitorReport) -> str:
    """Text summary of a batch monitoring run."""
    lines = [
        f"Sentinel batch (threshold={report.threshold}, grace={report.grace_steps} steps)",
        f"  traces: {len(report.verdicts)}  killed: {report.n_killed}",
        f"  precision={report.precision:.4f} recall={report.recall:.4f} "
        f"F={report.f_measure:.4f}",
        f"  kill-before-completion rate: {report.kill_before_completion_rate:.4f}",
    ]
    if report.mean_decision_step_tp is not None:
        lines.append(
            f"  mean decision step (TP): {report.mean_decision_step_tp:.3f}, "
            f"mean onset step (TP): {report.mean_onset_step_tp:.3f}"
        )
    return "\n".join(lines) + "\n"


def verdict_lines(verdicts: Iterable[Verdict]) -> str:
    """Line-delimited verdict log."""
    return "".join(json.dumps(v.log_record()) + "\n" for v in verdicts)


def write_verdicts(verdicts: Iterable[Verdict], path: str | Path) -> Path:
    """Verdict log as JSON lines."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(verdict_lines(verdicts), encoding="utf-8")
    return target
