"""
Unit tests for branch-and-bound, propagation and the solve entry point
"""

import pytest

from src.core.constraints import LinearSparsityConstraint, max_support_size
from src.core.design import ExactDesign
from src.core.problem import check_feasible
from src.reduction import build_auxiliary
from src.solver import SolverOptions, SolverStatus, branch_and_bound, brute_force, presolve, solve
from src.solver.branch_and_bound import propagate


@pytest.fixture
def exact():
    return SolverOptions(gap=0.0, record_nodes=True)


class TestToyProblems:
    """Small problems with known optima"""

    def test_line(self, line_problem, exact):
        result = solve(line_problem, exact)
        assert result.status is SolverStatus.OPTIMAL
        assert result.design == ExactDesign(counts=(1, 0, 1))
        assert result.phi == pytest.approx(2.0)
        assert result.gap == 0.0

    def test_pair(self, pair_problem, exact):
        result = solve(pair_problem, exact)
        assert result.design == ExactDesign(counts=(1, 1))
        assert result.phi == pytest.approx(1.0)

    def test_sparse_toy_matches_enumeration(self, toy_sparse, exact):
        result = solve(toy_sparse, exact)
        oracle = brute_force(toy_sparse)
        assert result.status is SolverStatus.OPTIMAL
        assert result.phi == pytest.approx(oracle.phi, rel=1e-9)
        assert check_feasible(result.design, toy_sparse).feasible
        assert result.design.support_size <= 3

    def test_row_violated_below_total_tolerance(self, line_problem, exact):
        row = LinearSparsityConstraint(a=(0.0, 0.0, 1.0), c=(0.0, 0.0, 0.0), b=1.0 - 2e-9, name="tight")
        problem = line_problem.with_constraints([row])
        result = solve(problem, exact)
        assert result.status is SolverStatus.OPTIMAL
        assert result.design == ExactDesign(counts=(1, 1, 0))
        assert result.phi == pytest.approx(1.0)
        assert check_feasible(result.design, problem).feasible

    def test_oracle_flag(self, line_problem, exact):
        result = solve(line_problem, exact, oracle=True)
        assert result.method == "brute-force"
        assert result.design == ExactDesign(counts=(1, 0, 1))


class TestDegenerateProblems:
    """Infeasible, singular and empty designs"""

    def test_infeasible(self, line_problem, exact):
        row = LinearSparsityConstraint(a=(1.0, 1.0, 1.0), c=(0.0, 0.0, 0.0), b=1.0, name="too small")
        result = solve(line_problem.with_constraints([row]), exact)
        assert result.status is SolverStatus.INFEASIBLE
        assert result.design is None
        assert not result.feasible

    def test_only_singular_designs(self, line_problem, exact):
        result = solve(line_problem.with_constraints(max_support_size(line_problem.space, 1)), exact)
        assert result.status is SolverStatus.OPTIMAL
        assert result.phi == 0.0
        assert result.design.support_size == 1

    def test_zero_size(self, line_problem, exact):
        result = solve(line_problem.with_size(0), exact)
        assert result.status is SolverStatus.OPTIMAL
        assert result.design == ExactDesign.zeros(3)
        assert result.phi == 0.0


class TestPropagation:
    """Bound tightening from linking and size rows"""

    def test_size_row_fixes_other_points(self, line_problem):
        compact = presolve(build_auxiliary(line_problem))
        lower, upper = compact.lower.copy(), compact.upper.copy()
        lower[1] = 2
        assert propagate(compact, lower, upper)
        assert upper[0] == 0 and upper[2] == 0
        assert lower[compact.n + 1] == 1  # positive count switches the indicator on

    def test_indicator_off_closes_count(self, line_problem):
        compact = presolve(build_auxiliary(line_problem))
        lower, upper = compact.lower.copy(), compact.upper.copy()
        upper[compact.n] = 0
        assert propagate(compact, lower, upper)
        assert upper[0] == 0

    def test_empty_box(self, line_problem):
        compact = presolve(build_auxiliary(line_problem))
        lower, upper = compact.lower.copy(), compact.upper.copy()
        lower[0], lower[1] = 2, 1
        assert not propagate(compact, lower, upper)


class TestSearch:
    """Logs, limits and reproducibility"""

    def test_deterministic(self, toy_sparse, exact):
        first = solve(toy_sparse, exact)
        second = solve(toy_sparse, exact)
        assert first.design == second.design
        assert first.nodes == second.nodes
        assert [(r.node_id, r.action) for r in first.node_log] == [(r.node_id, r.action) for r in second.node_log]

    def test_incumbent_is_monotone(self, toy_sparse, exact):
        history = solve(toy_sparse, exact).incumbent_history
        assert history
        values = [update.phi for update in history]
        assert values == sorted(values)

    def test_node_log(self, toy_sparse, exact):
        result = solve(toy_sparse, exact)
        assert result.node_log[0].depth == 0
        assert len(result.node_log) >= result.nodes
        assert {r.action for r in result.node_log} <= {'branched', 'pruned', 'infeasible', 'leaf', 'closed'}

    def test_root_bound_is_valid(self, toy_sparse, exact):
        result = solve(toy_sparse, exact)
        assert result.root_bound >= result.phi - 1e-8

    def test_node_limit(self, cr_problems):
        result = solve(cr_problems['w0'], SolverOptions(gap=0.0, node_limit=1, relax_max_iter=50))
        assert result.status is SolverStatus.NODE_LIMIT
        assert result.nodes == 1
        assert result.upper_bound >= result.phi

    def test_accepts_auxiliary_input(self, line_problem, exact):
        result = branch_and_bound(build_auxiliary(line_problem), exact)
        assert result.phi == pytest.approx(2.0)

    def test_parallel_matches_serial(self, toy_sparse):
        serial = solve(toy_sparse, SolverOptions(gap=0.0))
        parallel = solve(toy_sparse, SolverOptions(gap=0.0, threads=2, deterministic=False))
        assert parallel.phi == pytest.approx(serial.phi, rel=1e-9)
