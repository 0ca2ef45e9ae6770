"""
Unit tests for the auxiliary-problem text format
"""

import numpy as np
import pytest

from src.core.constraints import max_support_size
from src.core.criteria import criterion_D
from src.core.exceptions import ProblemFileError
from src.core.problem import check_feasible, information_matrix
from src.reduction import build_auxiliary, export_auxiliary, read_auxiliary
from src.reduction.export import format_auxiliary, parse_auxiliary
from src.solver import SolverStatus, brute_force
from src.utils.problem_loader import load_problem
from tests.conftest import random_problem


class TestExport:
    """Writer and reader agree"""

    def test_file_round_trip(self, cr_problems, tmp_path):
        aux = build_auxiliary(cr_problems['w3'])
        path = export_auxiliary(aux, tmp_path / "w3.aux")
        restored = read_auxiliary(path)
        assert restored.same_structure(aux)
        assert restored.origin is None

    def test_header_and_sections(self, line_problem):
        problem = line_problem.with_constraints(max_support_size(line_problem.space, 2, name="at most two"))
        text = format_auxiliary(build_auxiliary(problem))
        lines = [line for line in text.splitlines() if line and not line.startswith('#')]
        assert lines[0] == "LASAUX 1"
        assert lines[1].split() == ["DIMS", "3", "1", "2", "2"]
        assert lines[-1] == "END"
        assert any(" at_most_two " in line for line in lines if line.startswith("ROW"))
        assert sum(line.startswith("VAR") for line in lines) == 6
        assert sum(line.startswith("REG") for line in lines) == 6


class TestReadBackSolves:
    """Enumeration on a re-read file agrees with enumeration in memory"""

    @staticmethod
    def _solve_both(problem, path):
        export_auxiliary(build_auxiliary(problem), path)
        return brute_force(problem), brute_force(read_auxiliary(path))

    def test_toy_line(self, data_dir, tmp_path):
        problem = load_problem(data_dir / "problems" / "toy_line.json")
        expected, restored = self._solve_both(problem, tmp_path / "toy_line.aux")
        assert restored.status is SolverStatus.OPTIMAL
        assert restored.phi == pytest.approx(expected.phi, rel=1e-12)
        assert restored.design == expected.design

    def test_random_instances(self, tmp_path):
        rng = np.random.default_rng(17)
        solved = 0
        for trial in range(20):
            problem = random_problem(rng, max_n=4, max_N=3)
            expected, restored = self._solve_both(problem, tmp_path / f"random{trial}.aux")
            assert restored.status is expected.status, f"instance {trial}"
            if expected.status is SolverStatus.INFEASIBLE:
                continue
            solved += 1
            assert restored.phi == pytest.approx(expected.phi, rel=1e-9, abs=1e-12)
            assert check_feasible(restored.design, problem).feasible
            phi = criterion_D(information_matrix(problem, restored.design))
            assert phi == pytest.approx(expected.phi, rel=1e-9, abs=1e-12)
        assert solved > 0


class TestParseErrors:
    """Diagnostics carry the line number"""

    def test_bad_header(self):
        with pytest.raises(ProblemFileError, match="<string>:1"):
            parse_auxiliary("LASAUX 2\nEND\n")

    def test_unknown_keyword(self, line_problem):
        text = format_auxiliary(build_auxiliary(line_problem)).replace("END", "FOO 1\nEND")
        with pytest.raises(ProblemFileError, match="Unknown keyword"):
            parse_auxiliary(text)

    def test_bad_number(self, line_problem):
        lines = format_auxiliary(build_auxiliary(line_problem)).splitlines()
        index = next(k for k, line in enumerate(lines) if line.startswith("DIMS"))
        lines[index] = "DIMS 3 1 two 2"
        with pytest.raises(ProblemFileError) as info:
            parse_auxiliary("\n".join(lines))
        assert info.value.line == index + 1

    def test_missing_end(self, line_problem):
        text = format_auxiliary(build_auxiliary(line_problem)).replace("END", "")
        with pytest.raises(ProblemFileError, match="END"):
            parse_auxiliary(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemFileError):
            read_auxiliary(tmp_path / "absent.aux")
