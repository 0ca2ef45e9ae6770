"""
Bounded-variable primal simplex on a dense tableau

    maximize  c^T x
    s.t.      A_ub x <= b_ub,   A_eq x = b_eq,   lower <= x <= upper   (finite boxes)

Nonbasic variables sit at one of their bounds. Phase 1 starts from x = lower,
makes a row's slack basic when its residual is non-negative and adds a signed
artificial otherwise, then minimizes the sum of artificials. After phase 1 the
artificials are fixed at zero and the same basis is reused for any number of
phase-2 objectives (maximize()).

Pricing is Bland's rule, or Dantzig with a permanent switch to Bland after a
streak of degenerate pivots. Ties always go to the lowest column index.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.core.exceptions import DesignError, LPNumericalError

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
REDUCED_COST_TOL = 1e-11
BOUND_TOL = 1e-9
DEGENERATE_STREAK = 50
REFACTOR_EVERY = 64
MAX_CONDITION = 1e13


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass
class LPResult:
    status: LPStatus
    x: Optional[np.ndarray] = None
    objective: float = -math.inf
    phase1_residual: float = 0.0
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _as_rows(A, b, nv: int):
    if A is None or b is None or np.size(b) == 0:
        return np.zeros((0, nv)), np.zeros(0)
    A = np.asarray(A, dtype=float).reshape(-1, nv)
    b = np.asarray(b, dtype=float).ravel()
    if A.shape[0] != b.size:
        raise DesignError(f"LP rows: {A.shape[0]} rows but {b.size} right-hand sides")
    return A, b


class BoundedSimplex:
    """Phase 1 once per polytope; maximize() for each objective afterwards"""

    def __init__(self, A_ub, b_ub, A_eq, b_eq, lower, upper, pricing: str = 'bland'):
        lower = np.asarray(lower, dtype=float).ravel()
        upper = np.asarray(upper, dtype=float).ravel()
        nv = lower.size
        if upper.size != nv:
            raise DesignError("LP bounds: lower and upper differ in length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise DesignError("LP bounds must be finite")
        A_ub, b_ub = _as_rows(A_ub, b_ub, nv)
        A_eq, b_eq = _as_rows(A_eq, b_eq, nv)
        if not (np.all(np.isfinite(A_ub)) and np.all(np.isfinite(A_eq))
                and np.all(np.isfinite(b_ub)) and np.all(np.isfinite(b_eq))):
            raise DesignError("LP rows must be finite")

        self.nv = nv
        self.bland = pricing == 'bland'
        self.iterations = 0
        self.feasible = bool(np.all(lower <= upper + BOUND_TOL))
        self.phase1_residual = 0.0 if self.feasible else math.inf
        if not self.feasible:
            return
        upper = np.maximum(upper, lower)

        n_ub, n_eq = b_ub.size, b_eq.size
        rows = np.vstack([A_ub, A_eq])
        self.b = np.concatenate([b_ub, b_eq])
        n_rows = n_ub + n_eq
        residual = self.b - rows @ lower

        needs_artificial = np.ones(n_rows, dtype=bool)
        needs_artificial[:n_ub] = residual[:n_ub] < 0
        artificial_rows = np.nonzero(needs_artificial)[0]
        n_art = artificial_rows.size
        ncol = nv + n_ub + n_art

        full = np.zeros((n_rows, ncol))
        full[:, :nv] = rows
        full[np.arange(n_ub), nv + np.arange(n_ub)] = 1.0
        signs = np.where(residual[artificial_rows] >= 0, 1.0, -1.0)
        art_cols = nv + n_ub + np.arange(n_art)
        full[artificial_rows, art_cols] = signs

        self.full = full
        self.lo = np.concatenate([lower, np.zeros(n_ub + n_art)])
        self.hi = np.concatenate([upper, np.full(n_ub + n_art, np.inf)])
        self.art_cols = art_cols

        basis = nv + np.arange(n_rows)
        basis[artificial_rows] = art_cols
        self.basis = basis
        self.is_basic = np.zeros(ncol, dtype=bool)
        self.is_basic[basis] = True

        self.x = self.lo.copy()
        coef = full[np.arange(n_rows), basis]
        self.T = full / coef[:, None]
        self.xB = residual / coef
        self.x[basis] = self.xB
        self._pivots_since_refactor = 0

        self.feas_tol = BOUND_TOL * (1.0 + (float(np.max(np.abs(self.b))) if n_rows else 0.0))
        if n_art:
            c1 = np.zeros(ncol)
            c1[art_cols] = -1.0
            self._iterate(c1)
            self.phase1_residual = float(np.sum(self.x[art_cols]))
            if self.phase1_residual > self.feas_tol:
                self.feasible = False
                logger.debug(f"LP infeasible: phase-1 residual {self.phase1_residual:.3e}")
                return
            self.hi[art_cols] = 0.0
            self._drive_out_artificials()

    # ------------------------------------------------------------------
    def _refactor(self):
        """Recompute tableau and basic values from the original columns"""
        self._pivots_since_refactor = 0
        if self.T.shape[0] == 0:
            return
        B = self.full[:, self.basis]
        try:
            inverse = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise LPNumericalError("Simplex basis became singular", math.inf)
        condition = float(np.linalg.norm(B, 1) * np.linalg.norm(inverse, 1))
        if not np.isfinite(condition) or condition > MAX_CONDITION:
            raise LPNumericalError("Simplex basis is ill-conditioned", condition)
        nonbasic = ~self.is_basic
        rhs = self.b - self.full[:, nonbasic] @ self.x[nonbasic]
        self.T = inverse @ self.full
        self.xB = inverse @ rhs
        lo, hi = self.lo[self.basis], self.hi[self.basis]
        scale = 1.0 + np.maximum(np.abs(lo), np.where(np.isfinite(hi), np.abs(hi), 0.0))
        drift = np.maximum(lo - self.xB, self.xB - hi) / scale
        if drift.size and float(np.max(drift)) > 1e-6:
            raise LPNumericalError(f"Basic solution drifted {float(np.max(drift)):.3e} outside its bounds", condition)
        self.xB = np.clip(self.xB, lo, hi)
        self.x[self.basis] = self.xB

    def _pivot(self, row: int, col: int):
        pivot_row = self.T[row] / self.T[row, col]
        column = self.T[:, col].copy()
        column[row] = 0.0
        self.T -= np.outer(column, pivot_row)
        self.T[row] = pivot_row
        leaving = self.basis[row]
        self.is_basic[leaving] = False
        self.is_basic[col] = True
        self.basis[row] = col
        self._pivots_since_refactor += 1

    def _iterate(self, c: np.ndarray):
        n_rows, ncol = self.T.shape
        max_iter = 50 * (n_rows + ncol) + 100
        dtol = REDUCED_COST_TOL * max(1.0, float(np.max(np.abs(c))))
        streak = 0
        for it in range(max_iter):
            if self._pivots_since_refactor >= REFACTOR_EVERY:
                self._refactor()
            reduced = c - c[self.basis] @ self.T
            reduced[self.is_basic] = 0.0
            can_increase = self.x < self.hi - BOUND_TOL
            can_decrease = self.x > self.lo + BOUND_TOL
            increase = (reduced > dtol) & can_increase
            decrease = (reduced < -dtol) & can_decrease
            eligible = np.nonzero(increase | decrease)[0]
            if eligible.size == 0:
                self.iterations += it
                return
            if self.bland:
                col = int(eligible[0])
            else:
                col = int(eligible[np.argmax(np.abs(reduced[eligible]))])
            direction = 1.0 if increase[col] else -1.0
            alpha = self.T[:, col] * direction

            lo_b, hi_b = self.lo[self.basis], self.hi[self.basis]
            ratios = np.full(n_rows, np.inf)
            down = alpha > PIVOT_TOL
            up = alpha < -PIVOT_TOL
            ratios[down] = (self.xB[down] - lo_b[down]) / alpha[down]
            ratios[up] = (hi_b[up] - self.xB[up]) / (-alpha[up])
            ratios = np.maximum(ratios, 0.0)
            t_row = float(np.min(ratios)) if n_rows else math.inf
            t_flip = self.hi[col] - self.lo[col]

            if math.isinf(t_row) and math.isinf(t_flip):
                raise LPNumericalError("LP is unbounded in a bounded box", math.nan)
            if t_flip <= t_row:
                step = t_flip
                self.x[col] = self.hi[col] if direction > 0 else self.lo[col]
                self.xB -= step * alpha
            else:
                step = t_row
                tied = np.nonzero(ratios <= t_row + 1e-12)[0]
                if self.bland:
                    row = int(tied[np.argmin(self.basis[tied])])
                else:
                    row = int(tied[np.argmax(np.abs(alpha[tied]))])
                leaving = self.basis[row]
                entering_value = self.x[col] + direction * step
                self.xB -= step * alpha
                self.x[leaving] = self.lo[leaving] if alpha[row] > 0 else self.hi[leaving]
                self._pivot(row, col)
                self.xB[row] = entering_value
            self.x[self.basis] = self.xB

            if step <= BOUND_TOL:
                streak += 1
                if not self.bland and streak > DEGENERATE_STREAK:
                    logger.debug("Simplex: degenerate streak, switching to Bland's rule")
                    self.bland = True
            else:
                streak = 0
        B = self.full[:, self.basis]
        raise LPNumericalError(f"Simplex did not terminate within {max_iter} iterations",
                               float(np.linalg.cond(B)))

    def _drive_out_artificials(self):
        """Pivot zero-level basic artificials out where a structural or slack column allows"""
        is_art = np.zeros(self.T.shape[1], dtype=bool)
        is_art[self.art_cols] = True
        for row in range(self.T.shape[0]):
            if not is_art[self.basis[row]]:
                continue
            candidates = np.nonzero(~self.is_basic & ~is_art & (np.abs(self.T[row]) > 1e-7))[0]
            if candidates.size == 0:
                continue  # redundant row; the artificial stays basic at zero
            col = int(candidates[np.argmax(np.abs(self.T[row, candidates]))])
            leaving = self.basis[row]
            self._pivot(row, col)
            self.x[leaving] = 0.0
            self.xB[row] = self.x[col]
        self._refactor()

    # ------------------------------------------------------------------
    def maximize(self, c) -> LPResult:
        """Optimal vertex for objective c over the structural variables"""
        if not self.feasible:
            return LPResult(LPStatus.INFEASIBLE, phase1_residual=self.phase1_residual)
        c = np.asarray(c, dtype=float).ravel()
        if c.size != self.nv:
            raise DesignError(f"Objective has {c.size} entries, LP has {self.nv} variables")
        c_full = np.zeros(self.T.shape[1])
        c_full[:self.nv] = c
        before = self.iterations
        self._iterate(c_full)
        x = np.clip(self.x[:self.nv], self.lo[:self.nv], self.hi[:self.nv])
        return LPResult(LPStatus.OPTIMAL, x=x, objective=float(c @ x),
                        phase1_residual=self.phase1_residual, iterations=self.iterations - before)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lower=None, upper=None,
             pricing: str = 'bland') -> LPResult:
    """One-shot LP: maximize c^T x over rows and finite boxes"""
    c = np.asarray(c, dtype=float).ravel()
    lower = np.zeros(c.size) if lower is None else lower
    if upper is None:
        raise DesignError("solve_lp needs finite upper bounds")
    return BoundedSimplex(A_ub, b_ub, A_eq, b_eq, lower, upper, pricing=pricing).maximize(c)
