"""
Test JSONPath queries over evaluation reports.
"""

import pytest

from driveby_sentinel.evaluation.metrics import metric_row
from driveby_sentinel.models.reports import ConfusionCounts, EvalReport
from driveby_sentinel.selectors.jsonpath import ReportSelector, create_selector

WEAK = ConfusionCounts(tp=6, fp=4, tn=6, fn=4)
GOOD = ConfusionCounts(tp=9, fp=1, tn=9, fn=1)
PERFECT = ConfusionCounts(tp=10, tn=10)


@pytest.fixture
def report():
    """A sweep with two variants of j48 and one nb curve, rows out of order."""
    rows = (
        metric_row("j48", 3, GOOD, variant="with_meta"),
        metric_row("j48", 1, WEAK, variant="with_meta"),
        metric_row("j48", 2, PERFECT, variant="with_meta"),
        metric_row("j48", 1, GOOD, variant="without_meta"),
        metric_row("j48", 2, GOOD, variant="without_meta"),
        metric_row("nb", 1, WEAK),
    )
    return EvalReport(experiment="sweep", dataset_ids=("toy",), seed=7, rows=rows)


@pytest.fixture
def selector(report):
    """Selector over the sweep."""
    return ReportSelector(report)


class TestFind:
    """Test raw JSONPath queries."""

    def test_find_all_f_measures(self, selector):
        """Test a wildcard returns one value per row."""
        values = selector.find("$.rows[*].f_measure")
        assert len(values) == 6
        assert max(values) == pytest.approx(1.0)

    def test_find_first(self, selector):
        """Test the first match and a missing path."""
        assert selector.find_first("$.experiment") == "sweep"
        assert selector.find_first("$.no_such_field") is None

    def test_filter_expression(self, selector):
        """Test a filter on row fields."""
        steps = selector.find("$.rows[?@.algorithm=='nb'].upto_step")
        assert steps == [1]


class TestRows:
    """Test typed row helpers."""

    def test_rows_for_variant_sorted(self, selector):
        """Test rows come back typed and ordered by step."""
        rows = selector.rows_for("j48", "with_meta")
        assert [r.upto_step for r in rows] == [1, 2, 3]
        assert all(r.variant == "with_meta" for r in rows)
        assert rows[1].confusion == PERFECT

    def test_rows_for_every_variant(self, selector):
        """Test no variant keeps both arms."""
        assert len(selector.rows_for("j48")) == 5

    def test_f_curve(self, selector):
        """Test (step, F) pairs match the report's own curve."""
        curve = selector.f_curve("j48", "with_meta")
        assert [step for step, _ in curve] == [1, 2, 3]
        assert [f for _, f in curve] == pytest.approx(
            selector.report.f_curve("j48", "with_meta")
        )

    def test_best_step_is_earliest_maximum(self, selector):
        """Test the peak step, and the first of tied peaks."""
        assert selector.best_step("j48", "with_meta") == 2
        assert selector.best_step("j48", "without_meta") == 1

    def test_best_step_without_rows(self, selector):
        """Test an unknown algorithm has no best step."""
        assert selector.best_step("mlp") is None


class TestUpdate:
    """Test swapping the queried report."""

    def test_update_report(self, selector, report):
        """Test queries follow the new report."""
        smaller = report.model_copy(update={"rows": report.rows[:1]})
        selector.update_report(smaller)
        assert selector.find("$.rows[*].upto_step") == [3]
        assert selector.report is smaller

    def test_create_selector(self, report):
        """Test the factory function."""
        assert create_selector(report).find_first("$.seed") == 7
