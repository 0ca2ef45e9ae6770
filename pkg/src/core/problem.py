"""
LAS-constrained exact design problem: information matrix, efficiency and feasibility
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Tuple

import numpy as np

from src.core.constraints import LinearSparsityConstraint, normalized_rows
from src.core.criteria import criterion_D
from src.core.design import DesignSpace, ExactDesign
from src.core.exceptions import DesignError, DimensionMismatchError, SingularDesignError
from src.models.base import InformationModel

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9


class Criterion(Enum):
    """Optimality criteria; only D is implemented"""
    D = "D"


@dataclass(frozen=True, eq=False)
class LASProblem:
    """Design space + information model + LAS rows + size N + criterion"""
    space: DesignSpace
    model: InformationModel
    constraints: Tuple[LinearSparsityConstraint, ...] = ()
    N: int = 1
    criterion: Criterion = Criterion.D
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'constraints', tuple(self.constraints))
        if int(self.N) != self.N or self.N < 0:
            raise DesignError(f"Design size N must be a non-negative integer, got {self.N}")
        object.__setattr__(self, 'N', int(self.N))
        if not isinstance(self.criterion, Criterion):
            try:
                object.__setattr__(self, 'criterion', Criterion(str(self.criterion).upper()))
            except ValueError:
                raise DesignError(f"Unsupported criterion: {self.criterion!r} (only D is implemented)")
        for k, constraint in enumerate(self.constraints):
            if constraint.n != self.space.n:
                raise DimensionMismatchError(
                    f"Constraint {constraint.name or k} has {constraint.n} coefficients, "
                    f"design space has {self.space.n} points"
                )

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> int:
        return self.model.m

    @cached_property
    def elementary_matrices(self) -> np.ndarray:
        """H(x_i) stacked as (n, m, m)"""
        matrices = self.model.elementary_matrices(self.space)
        if matrices.shape != (self.n, self.m, self.m):
            raise DimensionMismatchError(
                f"Model produced matrices of shape {matrices.shape}, expected {(self.n, self.m, self.m)}"
            )
        return matrices

    @cached_property
    def rows(self):
        """Normalized <= rows (A, C, b, source)"""
        return normalized_rows(self.constraints, self.n)

    def with_constraints(self, extra: Iterable[LinearSparsityConstraint], name: str = "") -> 'LASProblem':
        """Copy of the problem with rows appended"""
        return replace(self, constraints=self.constraints + tuple(extra), name=name or self.name)

    def with_size(self, N: int) -> 'LASProblem':
        return replace(self, N=N)


@dataclass
class ConstraintViolation:
    """One violated row of a feasibility check"""
    index: int          # position of the constraint in problem.constraints
    name: str
    lhs: float
    rhs: float
    slack: float        # rhs - lhs, negative when violated


@dataclass
class FeasibilityReport:
    """Outcome of check_feasible"""
    feasible: bool
    size_violation: int = 0
    violations: List[ConstraintViolation] = field(default_factory=list)

    def summary(self) -> str:
        if self.feasible:
            return "feasible"
        parts = []
        if self.size_violation:
            parts.append(f"size off by {self.size_violation:+d}")
        for v in self.violations:
            parts.append(f"{v.name or v.index}: lhs {v.lhs:.6g} > rhs {v.rhs:.6g}")
        return "infeasible (" + "; ".join(parts) + ")"


def information_matrix(problem: LASProblem, design: ExactDesign) -> np.ndarray:
    """M(w) = sum_i w(x_i) H(x_i)"""
    design.check_length(problem.space)
    return np.einsum('i,ijk->jk', design.array, problem.elementary_matrices)


def d_efficiency(w1: ExactDesign, w2: ExactDesign, problem: LASProblem) -> float:
    """eff(w1 | w2) = [det M(w1) / det M(w2)]^(1/m)"""
    reference = criterion_D(information_matrix(problem, w2))
    if reference == 0.0:
        raise SingularDesignError("Efficiency undefined: reference design has a singular information matrix")
    return criterion_D(information_matrix(problem, w1)) / reference


def check_feasible(design: ExactDesign, problem: LASProblem) -> FeasibilityReport:
    """Evaluate the size equality exactly and every LAS row within FEASIBILITY_TOL"""
    design.check_length(problem.space)
    counts, support = design.array, design.support
    size_violation = design.total - problem.N

    A, C, b, source = problem.rows
    violations = []
    if b.size:
        lhs = A @ counts + C @ support
        for k in np.nonzero(lhs - b > FEASIBILITY_TOL)[0]:
            constraint = problem.constraints[source[k]]
            violations.append(ConstraintViolation(
                index=int(source[k]), name=constraint.name,
                lhs=float(lhs[k]), rhs=float(b[k]), slack=float(b[k] - lhs[k]),
            ))
    violations.sort(key=lambda v: v.index)

    feasible = size_violation == 0 and not violations
    if not feasible:
        logger.debug(f"Design infeasible for {problem.name or 'problem'}: size off by {size_violation}, "
                     f"{len(violations)} rows violated")
    return FeasibilityReport(feasible=feasible, size_violation=size_violation, violations=violations)
