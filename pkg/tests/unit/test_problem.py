"""
Unit tests for LASProblem, information matrices, efficiency and feasibility reports
"""

import logging

import numpy as np
import pytest

from src.core.constraints import LinearSparsityConstraint, max_support_size
from src.core.design import DesignSpace, ExactDesign
from src.core.exceptions import DesignError, DimensionMismatchError, SingularDesignError
from src.core.problem import LASProblem, check_feasible, d_efficiency, information_matrix
from src.models import PolynomialModel


class TestInformationMatrix:
    """M(w) = sum_i w_i H(x_i)"""

    def test_zero_design(self, line_problem):
        M = information_matrix(line_problem, ExactDesign.zeros(3))
        np.testing.assert_array_equal(M, np.zeros((2, 2)))

    def test_two_point_sum(self, pair_problem):
        M = information_matrix(pair_problem, ExactDesign(counts=(1, 1)))
        np.testing.assert_allclose(M, [[2.0, 1.0], [1.0, 1.0]])

    def test_dimension_mismatch(self, line_problem):
        with pytest.raises(DimensionMismatchError):
            information_matrix(line_problem, ExactDesign(counts=(1, 1)))


class TestEfficiency:
    """eff(w1 | w2)"""

    def test_self_efficiency(self, line_problem):
        design = ExactDesign(counts=(1, 0, 1))
        assert d_efficiency(design, design, line_problem) == 1.0

    def test_singular_reference(self, line_problem):
        with pytest.raises(SingularDesignError):
            d_efficiency(ExactDesign(counts=(1, 0, 1)), ExactDesign(counts=(2, 0, 0)), line_problem)

    def test_ratio(self, line_problem):
        # Phi(1, 1, 0) = 1, Phi(1, 0, 1) = 2
        eff = d_efficiency(ExactDesign(counts=(1, 1, 0)), ExactDesign(counts=(1, 0, 1)), line_problem)
        assert eff == pytest.approx(0.5)


class TestCheckFeasible:
    """Size equality exact, rows within 1e-9"""

    def test_size_violation(self, line_problem):
        report = check_feasible(ExactDesign(counts=(1, 0, 0)), line_problem)
        assert not report.feasible
        assert report.size_violation == -1

    def test_row_violation_reports_slack(self, line_problem):
        problem = line_problem.with_constraints(max_support_size(line_problem.space, 1))
        report = check_feasible(ExactDesign(counts=(1, 0, 1)), problem)
        assert not report.feasible
        (violation,) = report.violations
        assert violation.index == 0
        assert violation.slack == pytest.approx(-1.0)
        assert "infeasible" in report.summary()

    def test_within_tolerance(self, line_problem):
        row = LinearSparsityConstraint(a=(1.0, 0.0, 0.0), c=(0.0, 0.0, 0.0), b=1.0 - 5e-10)
        problem = line_problem.with_constraints([row])
        assert check_feasible(ExactDesign(counts=(1, 0, 1)), problem).feasible

    def test_independent_recomputation(self, rng):
        space = DesignSpace.from_values(np.arange(4, dtype=float))
        for _ in range(30):
            rows = []
            for k in range(3):
                a, c = rng.integers(-2, 3, 4), rng.integers(-2, 3, 4)
                c[0] = c[0] or 1
                rows.append(LinearSparsityConstraint(a=a, c=c, b=float(rng.integers(-2, 6)), name=f"r{k}"))
            problem = LASProblem(space=space, model=PolynomialModel(1), constraints=tuple(rows), N=4)
            counts = rng.multinomial(4, [0.25] * 4)
            design = ExactDesign.from_array(counts)
            expected = all(np.dot(r.a, counts) + np.dot(r.c, counts > 0) <= r.b + 1e-9 for r in rows)
            assert check_feasible(design, problem).feasible == expected


class TestProblem:
    """Problem validation"""

    def test_negative_size(self, line_problem):
        with pytest.raises(DesignError):
            line_problem.with_size(-1)

    def test_zero_size_allowed(self, line_problem):
        assert line_problem.with_size(0).N == 0

    def test_constraint_length(self):
        space = DesignSpace.from_values([0.0, 1.0])
        row = LinearSparsityConstraint(a=(1, 0, 0), c=(0, 0, 0), b=1)
        with pytest.raises(DimensionMismatchError):
            LASProblem(space=space, model=PolynomialModel(1), constraints=(row,), N=2)


class TestFeasibilityLogging:
    """Infeasible verdicts are logged at debug level"""

    def test_infeasible_logged(self, line_problem, caplog):
        with caplog.at_level(logging.DEBUG, logger="src.core.problem"):
            check_feasible(ExactDesign(counts=(1, 0, 0)), line_problem)
        assert "Design infeasible for line: size off by -1, 0 rows violated" in caplog.text

    def test_feasible_is_quiet(self, line_problem, caplog):
        with caplog.at_level(logging.DEBUG, logger="src.core.problem"):
            check_feasible(ExactDesign(counts=(1, 0, 1)), line_problem)
        assert "infeasible" not in caplog.text
