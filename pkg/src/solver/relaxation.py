"""
Continuous relaxation bound: maximize log det M(w) over the node polytope

Away-step conditional gradient with exact line search. The linear oracle is
the bounded simplex, solved once for feasibility per node and re-optimized for
every gradient. Concavity gives, for any feasible y,
    log det M(y) <= f(x) + g(x)^T (y - x) <= f(x) + gap(x),
so the minimum of f + gap over the iterations is a valid upper bound.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from src.core.criteria import EIGEN_FLOOR, log_det, phi_from_log_det
from src.solver.compact import CompactProblem
from src.solver.lp import BoundedSimplex
from src.solver.options import SolverOptions

logger = logging.getLogger(__name__)

GAP_TOL = 1e-7
RIDGE = 1e-10
BOUND_MARGIN = 1e-11
LINE_SEARCH_STEPS = 100


@dataclass
class RelaxationResult:
    """Fractional optimum of a node relaxation"""
    status: str                 # optimal | iteration-limit | infeasible
    m: int
    x: Optional[np.ndarray] = None
    log_det: float = -math.inf  # true objective at x
    bound: float = -math.inf    # log-det scale upper bound over the node polytope
    gap: float = math.inf       # last conditional-gradient gap
    iterations: int = 0
    ridge: float = 0.0

    @property
    def infeasible(self) -> bool:
        return self.status == 'infeasible'

    @property
    def degenerate(self) -> bool:
        """Singular start; the bound came from the ridged objective"""
        return self.ridge > 0.0

    @property
    def counts(self) -> Optional[np.ndarray]:
        return None if self.x is None else self.x[:self.x.size // 2]

    @property
    def indicators(self) -> Optional[np.ndarray]:
        return None if self.x is None else self.x[self.x.size // 2:]

    @property
    def phi(self) -> float:
        return phi_from_log_det(self.log_det, self.m)

    @property
    def phi_bound(self) -> float:
        return phi_from_log_det(self.bound, self.m)


def _line_search(L: np.ndarray, D: np.ndarray, max_step: float) -> float:
    """argmax over [0, max_step] of log det(M + t D), M = L L^T"""
    half = np.linalg.solve(L, D)
    mu = np.linalg.eigvalsh(np.linalg.solve(L, half.T).T)

    def slope(t):
        denom = 1.0 + t * mu
        if np.any(denom <= 0.0):
            return -math.inf
        return float(np.sum(mu / denom))

    if slope(0.0) <= 0.0:
        return 0.0
    if math.isfinite(max_step) and slope(max_step) >= 0.0:
        return max_step
    lo = 0.0
    hi = max_step if math.isfinite(max_step) else 1.0
    while not math.isfinite(max_step) and slope(hi) > 0.0:
        hi *= 2.0
    for _ in range(LINE_SEARCH_STEPS):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return lo


def _ridge_scale(compact: CompactProblem) -> float:
    traces = np.trace(compact.H, axis1=1, axis2=2)
    scale = compact.N * float(np.max(traces)) / compact.m if traces.size else 0.0
    return RIDGE * (scale if scale > 0.0 else 1.0)


def _cholesky(M: np.ndarray) -> Optional[np.ndarray]:
    norm = float(np.max(np.abs(M))) if M.size else 0.0
    if norm == 0.0:
        return None
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return None
    if float(np.min(np.diag(L))) ** 2 <= EIGEN_FLOOR * norm:
        return None
    return L


def _key(x: np.ndarray) -> bytes:
    return np.round(x, 9).tobytes()


def solve_relaxation(compact: CompactProblem, lower: Optional[np.ndarray] = None,
                     upper: Optional[np.ndarray] = None, options: Optional[SolverOptions] = None,
                     simplex: Optional[BoundedSimplex] = None) -> RelaxationResult:
    """Upper bound and fractional maximizer of log det M(w) over rows and boxes"""
    options = options or SolverOptions()
    if simplex is None:
        simplex = compact.simplex(lower, upper, pricing=options.lp_pricing)
    if not simplex.feasible:
        return RelaxationResult(status='infeasible', m=compact.m)

    # start: average of vertices for randomized objectives
    rng = np.random.default_rng(options.relax_seed)
    active: Dict[bytes, Tuple[np.ndarray, float]] = {}
    n_start = 2 * compact.m + 2
    for _ in range(n_start):
        vertex = simplex.maximize(rng.standard_normal(compact.n_vars)).x
        key = _key(vertex)
        weight = active[key][1] if key in active else 0.0
        active[key] = (vertex, weight + 1.0 / n_start)
    x = sum(w * v for v, w in active.values())

    if compact.N == 0:
        return RelaxationResult(status='optimal', m=compact.m, x=x, gap=0.0)

    ridge = 0.0
    if _cholesky(compact.information_matrix(x)) is None:
        ridge = _ridge_scale(compact)
        logger.debug(f"Relaxation start is singular, ridge {ridge:.3e} added")
    identity = np.eye(compact.m)

    best_bound = math.inf
    gap = math.inf
    status = 'iteration-limit'
    iterations = 0
    for iterations in range(1, options.relax_max_iter + 1):
        M = compact.information_matrix(x) + ridge * identity
        L = _cholesky(M)
        if L is None:
            # iterate drifted onto a singular face; continue on the ridged objective
            ridge = ridge or _ridge_scale(compact)
            L = np.linalg.cholesky(compact.information_matrix(x) + ridge * identity)
        f = 2.0 * float(np.sum(np.log(np.diag(L))))
        g = compact.gradient(L)

        fw = simplex.maximize(g).x
        gap = max(float(g @ (fw - x)), 0.0)
        best_bound = min(best_bound, f + gap)
        if gap <= GAP_TOL * (1.0 + abs(f)):
            status = 'optimal'
            break

        away_key = min(active, key=lambda k: float(g @ active[k][0]))
        away, away_weight = active[away_key]
        away_gap = float(g @ (x - away))
        toward = gap >= away_gap or len(active) == 1
        if toward:
            direction, max_step = fw - x, 1.0
        else:
            direction = x - away
            max_step = away_weight / (1.0 - away_weight)

        step = _line_search(L, compact.information_matrix(direction), max_step)
        if step <= 0.0:
            break
        x = x + step * direction

        if toward:
            active = {k: (v, w * (1.0 - step)) for k, (v, w) in active.items()}
            key = _key(fw)
            weight = active[key][1] if key in active else 0.0
            active[key] = (fw, weight + step)
        else:
            active = {k: (v, w * (1.0 + step)) for k, (v, w) in active.items()}
            v, w = active[away_key]
            active[away_key] = (v, w - step)
        active = {k: (v, w) for k, (v, w) in active.items() if w > 1e-14}

    bound = best_bound + BOUND_MARGIN * (1.0 + abs(best_bound)) if math.isfinite(best_bound) else best_bound
    true_value = log_det(compact.information_matrix(x))
    if ridge > 0.0:
        # log det(M + rho I) >= log det M, so the ridged bound is still valid
        logger.debug(f"Ridged relaxation: bound {bound:.6f}, true objective {true_value:.6f}")
    return RelaxationResult(status=status, m=compact.m, x=x, log_det=true_value, bound=bound,
                            gap=gap, iterations=iterations, ridge=ridge)
