"""
Unit tests for the enumeration oracle
"""

import math

import numpy as np
import pytest

from src.core.constraints import LinearSparsityConstraint
from src.core.design import DesignSpace, ExactDesign
from src.core.exceptions import BruteForceLimitError
from src.core.problem import LASProblem
from src.models import PolynomialModel
from src.reduction import build_auxiliary
from src.solver import SolverStatus, brute_force, enumerate_auxiliary_feasible, enumerate_feasible
from src.solver.brute_force import auxiliary_count, composition_count, compositions


class TestCompositions:
    """Stars and bars"""

    def test_count_and_sum(self):
        rows = np.vstack(list(compositions(4, 3, batch=4)))
        assert rows.shape == (composition_count(4, 3), 3) == (15, 3)
        assert np.all(rows.sum(axis=1) == 4)
        assert len({tuple(r) for r in rows}) == 15

    def test_single_point(self):
        (rows,) = list(compositions(3, 1))
        np.testing.assert_array_equal(rows, [[3]])

    def test_zero_size(self):
        (rows,) = list(compositions(0, 4))
        np.testing.assert_array_equal(rows, [[0, 0, 0, 0]])

    def test_auxiliary_count(self, line_problem):
        aux = build_auxiliary(line_problem)
        assert auxiliary_count(aux) == composition_count(2, 3) * 2 ** 3


class TestBruteForce:
    """Optimum, ties and limits"""

    def test_line(self, line_problem):
        result = brute_force(line_problem)
        assert result.status is SolverStatus.OPTIMAL
        assert result.design == ExactDesign(counts=(1, 0, 1))
        assert result.phi == pytest.approx(2.0)
        assert result.log_det == pytest.approx(math.log(4.0))
        assert result.nodes == composition_count(2, 3)
        assert result.method == "brute-force"

    def test_auxiliary_input_maps_back(self, line_problem):
        result = brute_force(build_auxiliary(line_problem))
        assert result.design == ExactDesign(counts=(1, 0, 1))
        assert result.phi == pytest.approx(2.0)

    def test_all_infeasible(self, line_problem):
        row = LinearSparsityConstraint(a=(1.0, 1.0, 1.0), c=(0.0, 0.0, 0.0), b=1.0, name="too small")
        result = brute_force(line_problem.with_constraints([row]))
        assert result.status is SolverStatus.INFEASIBLE
        assert result.design is None

    def test_zero_size(self, line_problem):
        result = brute_force(line_problem.with_size(0))
        assert result.design == ExactDesign.zeros(3)
        assert result.phi == 0.0

    def test_ties(self):
        # x = -1 listed twice: both copies pair with x = 1 for the same optimum
        space = DesignSpace.from_values([-1.0, 1.0, -1.0], labels=["a", "b", "c"])
        problem = LASProblem(space=space, model=PolynomialModel(1), N=2, name="mirror")
        result = brute_force(problem)
        assert result.phi == pytest.approx(2.0)
        assert set(result.ties) == {ExactDesign(counts=(1, 1, 0)), ExactDesign(counts=(0, 1, 1))}

    def test_cap(self, line_problem):
        with pytest.raises(BruteForceLimitError):
            brute_force(line_problem, cap=5)

    def test_small_batches_agree(self, toy_sparse):
        assert brute_force(toy_sparse, batch=3).phi == brute_force(toy_sparse).phi


class TestEnumeration:
    """Feasible sets of both problem forms"""

    def test_primary(self, line_problem):
        designs, values = enumerate_feasible(line_problem)
        assert designs.shape == (6, 3)
        assert np.sum(np.isfinite(values)) == 3

    def test_auxiliary_matches_primary(self, line_problem):
        designs, _ = enumerate_feasible(line_problem)
        aux_designs, _ = enumerate_auxiliary_feasible(build_auxiliary(line_problem))
        assert aux_designs.shape[0] == designs.shape[0]

    def test_cap(self, line_problem):
        with pytest.raises(BruteForceLimitError):
            enumerate_auxiliary_feasible(build_auxiliary(line_problem), cap=10)
