"""
Compilation of a LAS-constrained design problem into an auxiliary problem with
rank-one regressors and purely linear rows.

Each design point x_i becomes r replica points (x_i, 1..r) carrying the factors
of H(x_i), plus one label point z_i with a zero regressor whose count is the
support indicator of x_i. Big-M linking with M = N ties the two together.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.config import Config
from src.core.constraints import Sense
from src.core.criteria import criterion_D
from src.core.design import ExactDesign
from src.core.exceptions import DimensionMismatchError, InfeasibleDesignError, RankBoundError
from src.core.problem import LASProblem, check_feasible
from src.decomposition.factors import factor_stack

logger = logging.getLogger(__name__)

AUX_FEASIBILITY_TOL = 1e-9


def as_token(name: str) -> str:
    """Row names as single whitespace-free tokens"""
    return "_".join(name.replace("#", "_").split()) or "-"


class RowRole:
    """Origin of an auxiliary row"""
    REPLICA = "replica"
    LABEL = "label"
    LINK_LOWER = "link_lower"
    LINK_UPPER = "link_upper"
    LAS = "las"
    SIZE = "size"


@dataclass(frozen=True)
class AuxPoint:
    """Replica (x_i, j) or label z_i; indices are 1-based"""
    kind: str           # 'replica' or 'label'
    point: int
    replica: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == 'label':
            return f"z{self.point}"
        return f"x{self.point}_{self.replica}"


@dataclass(frozen=True)
class AuxRow:
    """Sparse linear row over auxiliary points (0-based indices)"""
    indices: Tuple[int, ...]
    values: Tuple[float, ...]
    rhs: float
    sense: Sense = Sense.LE
    role: str = RowRole.LAS
    name: str = ""

    def dense(self, n_aux: int) -> np.ndarray:
        row = np.zeros(n_aux)
        np.add.at(row, list(self.indices), list(self.values))
        return row

    def evaluate(self, counts: np.ndarray) -> float:
        return float(np.dot(counts[list(self.indices)], self.values)) if self.indices else 0.0


class AuxiliaryDesign(ExactDesign):
    """Integer counts over the n' = nr + n auxiliary points"""


@dataclass(frozen=True, eq=False)
class AuxiliaryProblem:
    """Auxiliary univariate-response problem with linear rows only"""
    n: int
    r: int
    m: int
    N: int
    aux_points: Tuple[AuxPoint, ...]
    regressors: np.ndarray          # (n', m), zero rows for labels
    linear_rows: Tuple[AuxRow, ...]
    size_row: AuxRow
    origin: Optional[LASProblem] = None

    @property
    def n_aux(self) -> int:
        return len(self.aux_points)

    @property
    def row_count(self) -> int:
        """Linear rows plus the size row"""
        return len(self.linear_rows) + 1

    def replica_index(self, i: int, j: int = 0) -> int:
        """0-based aux index of replica j of point i (both 0-based)"""
        return i * self.r + j

    def label_index(self, i: int) -> int:
        return self.n * self.r + i

    @property
    def upper_bounds(self) -> np.ndarray:
        """Implied variable bounds: N for replicas, 1 for labels"""
        return np.array([1.0 if p.kind == 'label' else float(self.N) for p in self.aux_points])

    def row_matrix(self, include_size: bool = True):
        """Dense (A, b, senses) of the linear rows, size row last"""
        rows = list(self.linear_rows) + ([self.size_row] if include_size else [])
        A = np.array([row.dense(self.n_aux) for row in rows]).reshape(len(rows), self.n_aux)
        b = np.array([row.rhs for row in rows])
        return A, b, [row.sense for row in rows]

    def same_structure(self, other: 'AuxiliaryProblem') -> bool:
        """Equality of everything except the origin back-reference"""
        return (
            (self.n, self.r, self.m, self.N) == (other.n, other.r, other.m, other.N)
            and self.aux_points == other.aux_points
            and np.array_equal(self.regressors, other.regressors)
            and self.linear_rows == other.linear_rows
            and self.size_row == other.size_row
        )


def build_auxiliary(problem: LASProblem, route: Optional[str] = None,
                    factors: Optional[np.ndarray] = None) -> AuxiliaryProblem:
    """
    Compile problem into its auxiliary form.

    Row order: replica equalities, label <= 1, linking pairs, mapped LAS rows;
    the size row is kept separately.
    """
    n, m, r, N = problem.n, problem.m, problem.model.rank_bound, problem.N
    if factors is None:
        factors = factor_stack(problem.elementary_matrices, r, route or Config.DECOMPOSITION_ROUTE)
    factors = np.asarray(factors, dtype=float)
    if factors.ndim != 3 or factors.shape[0] != n or factors.shape[2] != m:
        raise DimensionMismatchError(f"Expected factors of shape ({n}, {r}, {m}), got {factors.shape}")
    if factors.shape[1] != r:
        raise RankBoundError(f"Factors carry {factors.shape[1]} vectors per point, model rank bound is {r}")

    points = [AuxPoint('replica', i + 1, j + 1) for i in range(n) for j in range(r)]
    points += [AuxPoint('label', i + 1) for i in range(n)]
    regressors = np.vstack([factors.reshape(n * r, m), np.zeros((n, m))])

    def rep(i, j=0):
        return i * r + j

    def lab(i):
        return n * r + i

    rows: List[AuxRow] = []
    for i in range(n):
        for j in range(1, r):
            rows.append(AuxRow((rep(i), rep(i, j)), (1.0, -1.0), 0.0, Sense.EQ,
                               RowRole.REPLICA, f"replica[{i + 1},{j + 1}]"))
    for i in range(n):
        rows.append(AuxRow((lab(i),), (1.0,), 1.0, Sense.LE, RowRole.LABEL, f"label[{i + 1}]"))
    for i in range(n):
        rows.append(AuxRow((lab(i), rep(i)), (1.0, -1.0), 0.0, Sense.LE,
                           RowRole.LINK_LOWER, f"link_lo[{i + 1}]"))
        rows.append(AuxRow((rep(i), lab(i)), (1.0, -float(N)), 0.0, Sense.LE,
                           RowRole.LINK_UPPER, f"link_hi[{i + 1}]"))
    for k, constraint in enumerate(problem.constraints):
        indices, values = [], []
        for i in range(n):
            if constraint.a[i] != 0.0:
                indices.append(rep(i))
                values.append(constraint.a[i])
        for i in range(n):
            if constraint.c[i] != 0.0:
                indices.append(lab(i))
                values.append(constraint.c[i])
        rows.append(AuxRow(tuple(indices), tuple(values), constraint.b, constraint.sense,
                           RowRole.LAS, as_token(constraint.name or f"las[{k + 1}]")))

    size_row = AuxRow(tuple(rep(i) for i in range(n)), (1.0,) * n, float(N), Sense.EQ,
                      RowRole.SIZE, "size")
    aux = AuxiliaryProblem(n=n, r=r, m=m, N=N, aux_points=tuple(points), regressors=regressors,
                           linear_rows=tuple(rows), size_row=size_row, origin=problem)
    logger.info(f"Compiled auxiliary problem: n'={aux.n_aux} points, {aux.row_count} rows "
                f"(n={n}, r={r}, K={len(problem.constraints)})")
    return aux


def aux_violations(w_aux: AuxiliaryDesign, aux: AuxiliaryProblem) -> List[str]:
    """Names of violated rows (empty when feasible)"""
    if w_aux.n != aux.n_aux:
        raise DimensionMismatchError(f"Auxiliary design has {w_aux.n} counts, expected {aux.n_aux}")
    counts = w_aux.array
    violated = []
    for row in list(aux.linear_rows) + [aux.size_row]:
        lhs = row.evaluate(counts)
        if row.sense is Sense.EQ:
            bad = abs(lhs - row.rhs) > AUX_FEASIBILITY_TOL
        else:
            bad = lhs - row.rhs > AUX_FEASIBILITY_TOL
        if bad:
            violated.append(row.name)
    return violated


def is_aux_feasible(w_aux: AuxiliaryDesign, aux: AuxiliaryProblem) -> bool:
    return not aux_violations(w_aux, aux)


def kappa(w_aux: AuxiliaryDesign, aux: AuxiliaryProblem) -> ExactDesign:
    """Primary design read off the first replica of every point"""
    violated = aux_violations(w_aux, aux)
    if violated:
        raise InfeasibleDesignError(f"kappa needs a feasible auxiliary design; violated rows: {violated[:5]}")
    return ExactDesign(counts=tuple(w_aux.counts[aux.replica_index(i)] for i in range(aux.n)))


def lift(w: ExactDesign, aux: AuxiliaryProblem) -> AuxiliaryDesign:
    """Copy w(x_i) to every replica and the support indicator to z_i"""
    if aux.origin is None:
        raise InfeasibleDesignError("lift needs the source problem to check feasibility")
    report = check_feasible(w, aux.origin)
    if not report.feasible:
        raise InfeasibleDesignError(f"lift needs a feasible design: {report.summary()}")
    counts = [0] * aux.n_aux
    for i, value in enumerate(w.counts):
        for j in range(aux.r):
            counts[aux.replica_index(i, j)] = value
        counts[aux.label_index(i)] = 1 if value > 0 else 0
    return AuxiliaryDesign(counts=tuple(counts))


def aux_information_matrix(w_aux: AuxiliaryDesign, aux: AuxiliaryProblem) -> np.ndarray:
    """sum over aux points of count * f f^T"""
    F = aux.regressors
    return F.T @ (w_aux.array[:, None] * F)


def aux_objective(w_aux: AuxiliaryDesign, aux: AuxiliaryProblem) -> float:
    """Phi_D of the auxiliary information matrix; labels contribute nothing"""
    return criterion_D(aux_information_matrix(w_aux, aux))
