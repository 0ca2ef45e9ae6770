"""
Rounding heuristic for incumbents

Largest-remainder apportionment of the fractional counts to total N, then greedy
repair moves (one unit i -> j, or all units of i -> j, which toggles support)
that reduce the total row violation, then improving moves while feasible.
Never returns an infeasible design.
"""

import logging
import math
from typing import Optional

import numpy as np

from src.core.criteria import batch_log_det
from src.core.design import ExactDesign
from src.solver.compact import ROW_TOL, CompactProblem
from src.solver.relaxation import RelaxationResult

logger = logging.getLogger(__name__)

MAX_PASSES = 50


def largest_remainder(values: np.ndarray, total: int, tol: float = 1e-6) -> np.ndarray:
    """Integer vector summing to total; leftover units go to the largest fractional parts, ties to the lowest index"""
    values = np.maximum(np.asarray(values, dtype=float), 0.0)
    floors = np.floor(values + tol).astype(int)
    extra = int(total - floors.sum())
    if extra > 0:
        order = np.argsort(-(values - floors), kind='stable')
        while extra > 0:
            for i in order[:extra]:
                floors[i] += 1
            extra -= min(extra, order.size)
    elif extra < 0:
        order = np.argsort(values - floors, kind='stable')
        for i in order:
            if extra == 0:
                break
            take = min(floors[i], -extra)
            floors[i] -= take
            extra += take
    return floors


def _neighbours(counts: np.ndarray) -> np.ndarray:
    """All designs one repair move away: unit moves and whole-point moves"""
    n = counts.size
    donors = np.nonzero(counts > 0)[0]
    moves = []
    for i in donors:
        for amount in {1, int(counts[i])}:
            block = np.repeat(counts[None, :], n, axis=0)
            block[:, i] -= amount
            block[np.arange(n), np.arange(n)] += amount
            moves.append(np.delete(block, i, axis=0))
    if not moves:
        return np.zeros((0, n), dtype=int)
    return np.vstack(moves)


def _score(compact: CompactProblem, candidates: np.ndarray):
    rows = compact.row_violations(candidates)
    worst = rows.max(axis=1) if rows.shape[1] else np.zeros(rows.shape[0])
    values = batch_log_det(np.einsum('ki,ijl->kjl', candidates.astype(float), compact.H))
    return rows.sum(axis=1), worst, values


def repair(counts: np.ndarray, compact: CompactProblem) -> Optional[np.ndarray]:
    """Greedy repair then local improvement; None if no feasible design is reached"""
    tol = ROW_TOL
    counts = np.asarray(counts, dtype=int).copy()
    violation, worst, value = _score(compact, counts[None, :])
    violation, worst, value = float(violation[0]), float(worst[0]), float(value[0])

    for _ in range(MAX_PASSES):
        if worst <= tol:
            break
        candidates = _neighbours(counts)
        if candidates.shape[0] == 0:
            return None
        v, w, f = _score(compact, candidates)
        order = np.lexsort((-np.where(np.isfinite(f), f, -1e300), v))
        best = order[0]
        if v[best] >= violation - tol:
            return None
        counts, violation, worst, value = candidates[best], float(v[best]), float(w[best]), float(f[best])
    if worst > tol:
        return None

    for _ in range(MAX_PASSES):
        candidates = _neighbours(counts)
        if candidates.shape[0] == 0:
            break
        _, w, f = _score(compact, candidates)
        f = np.where(w <= tol, f, -math.inf)
        best = int(np.argmax(f))
        if math.isfinite(value):
            improved = f[best] > value + 1e-12 * (1.0 + abs(value))
        else:
            improved = math.isfinite(f[best])
        if not improved:
            break
        counts, value = candidates[best], float(f[best])
    return counts


def rounding_incumbent(relaxation: RelaxationResult, compact: CompactProblem,
                       int_tol: float = 1e-6) -> Optional[ExactDesign]:
    """Feasible design near the relaxed optimum, or None"""
    if relaxation.x is None:
        return None
    fractional = relaxation.counts
    counts = largest_remainder(fractional, compact.N, tol=int_tol)
    if np.all(np.abs(fractional - counts) <= int_tol) and compact.is_feasible(counts):
        return ExactDesign.from_array(counts)
    repaired = repair(counts, compact)
    if repaired is None:
        logger.debug("Rounding heuristic: repair failed")
        return None
    return ExactDesign.from_array(repaired)
