"""
Unit tests for report rows and tables
"""

import math

import pandas as pd
import pytest

from src.core.constraints import max_support_size
from src.core.design import ExactDesign
from src.core.exceptions import SingularDesignError
from src.services.report_builder import REPORT_COLUMNS, Report, evaluate_row


class TestEvaluateRow:
    """Columns of a single row"""

    def test_polynomial_row(self, line_problem):
        row = evaluate_row(line_problem, ExactDesign(counts=(1, 0, 1)))
        assert row.support == "-1 1"
        assert row.counts == "1 1"
        assert row.phi == pytest.approx(2.0)
        assert math.isnan(row.eff)
        assert math.isnan(row.cost) and math.isnan(row.expected_failures)
        assert row.feasible
        assert row.scenario == "line"

    def test_efficiency(self, line_problem):
        row = evaluate_row(line_problem, ExactDesign(counts=(1, 1, 0)), baseline=ExactDesign(counts=(1, 0, 1)))
        assert row.eff == pytest.approx(0.5)

    def test_singular_baseline(self, line_problem):
        with pytest.raises(SingularDesignError):
            evaluate_row(line_problem, ExactDesign(counts=(1, 0, 1)), baseline=ExactDesign(counts=(0, 2, 0)))

    def test_infeasible_design_is_flagged(self, line_problem):
        problem = line_problem.with_constraints(max_support_size(line_problem.space, 1))
        row = evaluate_row(problem, ExactDesign(counts=(1, 0, 1)), scenario="tight")
        assert not row.feasible
        assert "max_support" in row.violations

    def test_cr_columns(self, cr_problems, references):
        row = evaluate_row(cr_problems['w2'], references['w2'])
        assert row.support == "24 33 64 87"
        assert row.cost == pytest.approx(499.14, abs=0.02)
        assert row.expected_failures == pytest.approx(39.76, abs=0.01)


class TestReport:
    """Tables"""

    def test_empty(self):
        assert Report().to_text() == "(empty report)"
        assert list(Report().to_frame().columns) == REPORT_COLUMNS

    def test_text_rounds(self, line_problem):
        report = Report().add(evaluate_row(line_problem, ExactDesign(counts=(1, 1, 0)),
                                           baseline=ExactDesign(counts=(1, 0, 1))))
        text = report.to_text()
        assert "0.50" in text and "1.00" in text

    def test_csv_keeps_precision(self, line_problem, tmp_path):
        report = Report()
        report.add(evaluate_row(line_problem, ExactDesign(counts=(1, 1, 0)), scenario="a"))
        report.add(evaluate_row(line_problem, ExactDesign(counts=(1, 0, 1)), scenario="b"))
        frame = pd.read_csv(report.to_csv(tmp_path / "report.csv"))
        assert list(frame['scenario']) == ["a", "b"]
        assert frame['phi'][1] == 2.0
        assert 'violations' in frame.columns
