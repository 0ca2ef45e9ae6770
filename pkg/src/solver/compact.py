"""
Replica aliasing: the auxiliary problem restricted to replica-consistent designs

Replicas (x_i, 2..r) always equal (x_i, 1) on the feasible set, so they are
merged into one count variable w_i; the label z_i becomes the indicator s_i.
The compact problem has 2n variables ordered (w_1..w_n, s_1..s_n). A row's
coefficient on w_i is the sum of its coefficients on the replicas of x_i.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.core.constraints import Sense
from src.core.criteria import log_det
from src.core.problem import FEASIBILITY_TOL
from src.core.exceptions import InfeasibleDesignError
from src.reduction.auxiliary import AuxiliaryDesign, AuxiliaryProblem
from src.solver.lp import BoundedSimplex

logger = logging.getLogger(__name__)

ROW_TOL = FEASIBILITY_TOL


@dataclass(frozen=True, eq=False)
class CompactProblem:
    """2n-variable form used by relaxation, heuristics and branch-and-bound"""
    aux: AuxiliaryProblem
    n: int
    m: int
    r: int
    N: int
    factors: np.ndarray     # (n, r, m)
    H: np.ndarray           # (n, m, m) = sum_j f_ij f_ij^T
    A_ub: np.ndarray        # (K_ub, 2n)
    b_ub: np.ndarray
    A_eq: np.ndarray        # (K_eq, 2n), size row included
    b_eq: np.ndarray
    lower: np.ndarray       # (2n,)
    upper: np.ndarray
    pair_rows: Tuple[Tuple[int, float, float, float], ...]  # (i, coef_w, coef_s, rhs) as <= rows

    @property
    def n_vars(self) -> int:
        return 2 * self.n

    def information_matrix(self, x: np.ndarray) -> np.ndarray:
        """sum_i w_i H_i for the count part of a compact vector (or plain counts)"""
        return np.einsum('i,ijk->jk', np.asarray(x, dtype=float)[:self.n], self.H)

    def gradient(self, L: np.ndarray) -> np.ndarray:
        """
        Gradient of log det M at M = L L^T: d/dw_i = sum_j |L^-1 f_ij|^2, zero for s.
        """
        flat = self.factors.reshape(self.n * self.r, self.m)
        solved = np.linalg.solve(L, flat.T)
        per_factor = np.sum(solved * solved, axis=0).reshape(self.n, self.r)
        return np.concatenate([per_factor.sum(axis=1), np.zeros(self.n)])

    def simplex(self, lower=None, upper=None, pricing: str = 'dantzig') -> BoundedSimplex:
        lower = self.lower if lower is None else lower
        upper = self.upper if upper is None else upper
        return BoundedSimplex(self.A_ub, self.b_ub, self.A_eq, self.b_eq, lower, upper, pricing=pricing)

    def row_violations(self, counts: np.ndarray) -> np.ndarray:
        """Per-row violation (K, rows) for a batch of count vectors (K, n), indicators implied"""
        counts = np.atleast_2d(np.asarray(counts, dtype=float))
        X = np.hstack([counts, (counts > 0).astype(float)])
        parts = [np.zeros((counts.shape[0], 0))]
        if self.b_ub.size:
            parts.append(np.maximum(X @ self.A_ub.T - self.b_ub, 0.0))
        if self.b_eq.size:
            parts.append(np.abs(X @ self.A_eq.T - self.b_eq))
        return np.hstack(parts)

    def violations(self, counts: np.ndarray) -> np.ndarray:
        """Total row violation per count vector"""
        return self.row_violations(counts).sum(axis=1)

    def worst_violation(self, counts: np.ndarray) -> np.ndarray:
        """Largest single-row violation per count vector"""
        rows = self.row_violations(counts)
        return rows.max(axis=1) if rows.shape[1] else np.zeros(rows.shape[0])

    def is_feasible(self, counts) -> bool:
        """Same per-row test as check_feasible"""
        return bool(self.worst_violation(counts)[0] <= ROW_TOL)

    def log_det(self, counts) -> float:
        return log_det(self.information_matrix(counts))

    def to_aux_design(self, counts) -> AuxiliaryDesign:
        """Replicas copy w_i, labels carry the support indicator"""
        values = [0] * self.aux.n_aux
        for i, c in enumerate(np.asarray(counts).astype(int)):
            for j in range(self.r):
                values[self.aux.replica_index(i, j)] = int(c)
            values[self.aux.label_index(i)] = 1 if c > 0 else 0
        return AuxiliaryDesign(counts=tuple(values))


def presolve(aux: AuxiliaryProblem) -> CompactProblem:
    """Alias replicas onto 2n variables; rows that vanish are dropped"""
    n, r, m, N = aux.n, aux.r, aux.m, aux.N
    column = np.empty(aux.n_aux, dtype=int)
    for p, point in enumerate(aux.aux_points):
        column[p] = point.point - 1 if point.kind == 'replica' else n + point.point - 1

    ub_rows: List[np.ndarray] = []
    ub_rhs: List[float] = []
    eq_rows: List[np.ndarray] = []
    eq_rhs: List[float] = []
    dropped = 0
    for row in list(aux.linear_rows) + [aux.size_row]:
        coef = np.zeros(2 * n)
        np.add.at(coef, column[list(row.indices)], list(row.values))
        if not np.any(np.abs(coef) > 0.0):
            contradicts = abs(row.rhs) > ROW_TOL if row.sense is Sense.EQ else row.rhs < -ROW_TOL
            if contradicts:
                raise InfeasibleDesignError(f"Row {row.name} reads 0 {row.sense.value} {row.rhs}")
            dropped += 1
            continue
        if row.sense is Sense.EQ:
            eq_rows.append(coef)
            eq_rhs.append(row.rhs)
        else:
            ub_rows.append(coef)
            ub_rhs.append(row.rhs)

    pair_rows = []
    for coef, rhs, sense in ([(c, b, Sense.LE) for c, b in zip(ub_rows, ub_rhs)]
                             + [(c, b, Sense.EQ) for c, b in zip(eq_rows, eq_rhs)]):
        support = np.nonzero(coef)[0]
        owners = {int(k) % n for k in support}
        if len(owners) != 1 or len(support) > 2:
            continue
        i = owners.pop()
        cw, cs = float(coef[i]), float(coef[n + i])
        pair_rows.append((i, cw, cs, float(rhs)))
        if sense is Sense.EQ:
            pair_rows.append((i, -cw, -cs, -float(rhs)))

    flat = aux.regressors[:n * r].reshape(n, r, m)
    H = np.einsum('ijk,ijl->ikl', flat, flat)
    compact = CompactProblem(
        aux=aux, n=n, m=m, r=r, N=N, factors=flat, H=H,
        A_ub=np.array(ub_rows).reshape(len(ub_rows), 2 * n), b_ub=np.array(ub_rhs, dtype=float),
        A_eq=np.array(eq_rows).reshape(len(eq_rows), 2 * n), b_eq=np.array(eq_rhs, dtype=float),
        lower=np.zeros(2 * n), upper=np.concatenate([np.full(n, float(N)), np.ones(n)]),
        pair_rows=tuple(pair_rows),
    )
    logger.debug(f"Presolve: {aux.n_aux} -> {2 * n} variables, {len(ub_rows)} <= rows, "
                 f"{len(eq_rows)} = rows, {dropped} rows dropped")
    return compact
