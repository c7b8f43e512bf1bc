"""
JSONPath selector for querying evaluation reports.

Reports are plain pydantic models; this selector queries their JSON form
so that scripts and tests can pull curves out of any report without
knowing its nesting.
"""

import logging
from typing import Any

from jsonpath import findall
from pydantic import BaseModel

from driveby_sentinel.models.reports import MetricRow

logger = logging.getLogger(__name__)


class ReportSelector:
    """JSONPath-based selector for report rows."""

    def __init__(self, report: BaseModel):
        """Initialize selector with a report.

        Args:
            report: Any report model (EvalReport, AblationReport, GrowthReport, ...)
        """
        self.report = report
        self._report_dict = report.model_dump(mode="json")

    def find(self, jsonpath: str) -> list[Any]:
        """Find values using a JSONPath expression.

        Args:
            jsonpath: JSONPath expression (e.g., "$.rows[?@.algorithm=='j48']")

        Returns:
            List of matching values

        Example:
            # F-measure of every row
            selector.find("$.rows[*].f_measure")

            # Rows of the metadata-free ablation arm
            selector.find("$.without_meta.rows[*]")
        """
        results = findall(jsonpath, self._report_dict)
        logger.debug("JSONPath '%s' found %s results", jsonpath, len(results))
        return results

    def find_first(self, jsonpath: str) -> Any | None:
        """First value matching a JSONPath expression, or None."""
        results = self.find(jsonpath)
        return results[0] if results else None

    def rows_for(
        self, algorithm: str, variant: str | None = None, *, path: str = "$.rows"
    ) -> list[MetricRow]:
        """Metric rows of one algorithm (and variant), ordered by step.

        Args:
            algorithm: Report algorithm label (e.g. "j48")
            variant: Variant to keep, or None for every variant
            path: Location of the row list inside the report
        """
        condition = f"@.algorithm=='{algorithm}'"
        if variant is not None:
            condition += f" && @.variant=='{variant}'"
        rows = [MetricRow.model_validate(r) for r in self.find(f"{path}[?{condition}]")]
        return sorted(rows, key=lambda r: r.upto_step)

    def f_curve(
        self, algorithm: str, variant: str | None = None, *, path: str = "$.rows"
    ) -> list[tuple[int, float]]:
        """(upto_step, F-measure) pairs of one algorithm."""
        return [(r.upto_step, r.f_measure) for r in self.rows_for(algorithm, variant, path=path)]

    def best_step(
        self, algorithm: str, variant: str | None = None, *, path: str = "$.rows"
    ) -> int | None:
        """Earliest step reaching the highest F-measure, or None without rows."""
        curve = self.f_curve(algorithm, variant, path=path)
        if not curve:
            return None
        best = max(f for _, f in curve)
        return next(step for step, f in curve if f == best)

    def update_report(self, report: BaseModel) -> None:
        """Replace the report being queried."""
        self.report = report
        self._report_dict = report.model_dump(mode="json")
        logger.debug("Report updated for JSONPath selector")


def create_selector(report: BaseModel) -> ReportSelector:
    """Create a JSONPath selector for the given report."""
    return ReportSelector(report)
