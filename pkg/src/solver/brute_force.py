"""
Exhaustive enumeration oracle

Primary problems: every composition of N over the n points (stars and bars),
checked against the LAS rows in vectorized batches. Auxiliary problems: every
assignment of first-replica compositions, other replicas in 0..N and binary
labels, checked against the auxiliary rows.
"""

import itertools
import logging
import math
import time
from typing import Iterator, Optional, Tuple, Union

import numpy as np

from src.config import Config
from src.core.constraints import Sense
from src.core.criteria import batch_log_det
from src.core.design import ExactDesign
from src.core.exceptions import BruteForceLimitError
from src.core.problem import FEASIBILITY_TOL, LASProblem
from src.reduction.auxiliary import AUX_FEASIBILITY_TOL, AuxiliaryDesign, AuxiliaryProblem, kappa
from src.solver.options import SolverResult, SolverStatus

logger = logging.getLogger(__name__)

BATCH = 200_000
TIE_TOL = 1e-12
MAX_TIES = 1000


def composition_count(N: int, n: int) -> int:
    """Number of exact designs of size N on n points"""
    return math.comb(N + n - 1, n - 1)


def auxiliary_count(aux: AuxiliaryProblem) -> int:
    """Candidates enumerated for an auxiliary problem"""
    return composition_count(aux.N, aux.n) * (aux.N + 1) ** (aux.n * (aux.r - 1)) * 2 ** aux.n


def compositions(N: int, n: int, batch: int = BATCH) -> Iterator[np.ndarray]:
    """All non-negative integer n-vectors summing to N, in batches"""
    bars = itertools.combinations(range(N + n - 1), n - 1)
    while True:
        chunk = list(itertools.islice(bars, batch))
        if not chunk:
            return
        positions = np.array(chunk, dtype=int).reshape(len(chunk), n - 1)
        padded = np.hstack([np.full((len(chunk), 1), -1), positions, np.full((len(chunk), 1), N + n - 1)])
        yield np.diff(padded, axis=1) - 1


def _check_cap(estimate: int, cap: Optional[int]):
    cap = Config.BRUTE_FORCE_CAP if cap is None else cap
    if estimate > cap:
        raise BruteForceLimitError(estimate, cap)


def _primary_batches(problem: LASProblem, batch: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    A, C, b, _ = problem.rows
    H = problem.elementary_matrices
    for counts in compositions(problem.N, problem.n, batch):
        if b.size:
            lhs = counts @ A.T + (counts > 0).astype(float) @ C.T
            counts = counts[np.all(lhs - b <= FEASIBILITY_TOL, axis=1)]
        if counts.shape[0]:
            yield counts, batch_log_det(np.einsum('ki,ijl->kjl', counts.astype(float), H))


def _auxiliary_batches(aux: AuxiliaryProblem, batch: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    n, r, N = aux.n, aux.r, aux.N
    ranges = [range(N + 1)] * (n * (r - 1)) + [range(2)] * n
    extras = np.array(list(itertools.product(*ranges)), dtype=int).reshape(-1, len(ranges))
    first = [aux.replica_index(i, 0) for i in range(n)]
    others = [aux.replica_index(i, j) for i in range(n) for j in range(1, r)]
    labels = [aux.label_index(i) for i in range(n)]

    A, b, senses = aux.row_matrix()
    equality = np.array([s is Sense.EQ for s in senses])
    F = aux.regressors
    outer = F[:, :, None] * F[:, None, :]

    per_batch = max(1, batch // max(1, extras.shape[0]))
    for comps in compositions(N, n, per_batch):
        K = comps.shape[0] * extras.shape[0]
        X = np.zeros((K, aux.n_aux), dtype=int)
        X[:, first] = np.repeat(comps, extras.shape[0], axis=0)
        tiled = np.tile(extras, (comps.shape[0], 1))
        X[:, others] = tiled[:, :len(others)]
        X[:, labels] = tiled[:, len(others):]
        residual = X @ A.T - b
        ok = np.where(equality, np.abs(residual) <= AUX_FEASIBILITY_TOL, residual <= AUX_FEASIBILITY_TOL)
        X = X[np.all(ok, axis=1)]
        if X.shape[0]:
            yield X, batch_log_det(np.einsum('ka,ajl->kjl', X.astype(float), outer))


def enumerate_feasible(problem: LASProblem, cap: Optional[int] = None,
                       batch: int = BATCH) -> Tuple[np.ndarray, np.ndarray]:
    """All feasible exact designs (K, n) with their log-determinants"""
    _check_cap(composition_count(problem.N, problem.n), cap)
    return _collect(_primary_batches(problem, batch), problem.n)


def enumerate_auxiliary_feasible(aux: AuxiliaryProblem, cap: Optional[int] = None,
                                 batch: int = BATCH) -> Tuple[np.ndarray, np.ndarray]:
    """All feasible auxiliary designs (K, n') with their log-determinants"""
    _check_cap(auxiliary_count(aux), cap)
    return _collect(_auxiliary_batches(aux, batch), aux.n_aux)


def _collect(batches, width: int) -> Tuple[np.ndarray, np.ndarray]:
    designs, values = [], []
    for X, v in batches:
        designs.append(X)
        values.append(v)
    if not designs:
        return np.zeros((0, width), dtype=int), np.zeros(0)
    return np.vstack(designs), np.concatenate(values)


def _phi(values: np.ndarray, m: int) -> np.ndarray:
    return np.where(np.isfinite(values), np.exp(np.where(np.isfinite(values), values, 0.0) / m), 0.0)


def _tied(phi, best_phi: float):
    """Within TIE_TOL of the best value, relative; exact zero ties when the best is singular"""
    if best_phi > 0.0:
        return np.asarray(phi) >= best_phi * (1.0 - TIE_TOL)
    return np.asarray(phi) == 0.0


def brute_force(problem: Union[LASProblem, AuxiliaryProblem], cap: Optional[int] = None,
                batch: int = BATCH) -> SolverResult:
    """Exact argmax by enumeration; every maximizer within TIE_TOL is reported"""
    start = time.perf_counter()
    if isinstance(problem, AuxiliaryProblem):
        estimate = auxiliary_count(problem)
        _check_cap(estimate, cap)
        batches, m = _auxiliary_batches(problem, batch), problem.m
    else:
        estimate = composition_count(problem.N, problem.n)
        _check_cap(estimate, cap)
        batches, m = _primary_batches(problem, batch), problem.m
    logger.info(f"Brute force: enumerating {estimate:,} candidates")

    best_phi, best_value, best_row = -1.0, -math.inf, None
    candidates = []  # (phi, row) pairs that were within tolerance when seen
    for X, values in batches:
        phis = _phi(values, m)
        k = int(np.argmax(phis))
        if phis[k] > best_phi:
            best_phi, best_value, best_row = float(phis[k]), float(values[k]), X[k].copy()
            candidates = [(p, row) for p, row in candidates if _tied(p, best_phi)]
        for idx in np.nonzero(_tied(phis, best_phi))[0]:
            if len(candidates) < MAX_TIES:
                candidates.append((float(phis[idx]), X[idx].copy()))
    ties = [row for _, row in candidates]

    wall_time = time.perf_counter() - start
    if best_row is None:
        logger.info("Brute force: no feasible design")
        return SolverResult(status=SolverStatus.INFEASIBLE, nodes=estimate, wall_time=wall_time,
                            method="brute-force")

    if isinstance(problem, AuxiliaryProblem):
        design = kappa(AuxiliaryDesign(counts=tuple(best_row)), problem)
        tie_designs = [kappa(AuxiliaryDesign(counts=tuple(t)), problem) for t in ties]
    else:
        design = ExactDesign.from_array(best_row)
        tie_designs = [ExactDesign.from_array(t) for t in ties]
    unique = list(dict.fromkeys(tie_designs))
    if len(unique) > 1:
        logger.info(f"Brute force: {len(unique)} tied maximizers")
    return SolverResult(status=SolverStatus.OPTIMAL, design=design, phi=best_phi, log_det=best_value,
                        upper_bound=best_phi, gap=0.0, nodes=estimate, wall_time=wall_time,
                        ties=unique, method="brute-force")
