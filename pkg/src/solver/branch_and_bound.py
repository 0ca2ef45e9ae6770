"""
Best-first branch-and-bound over integer counts and binary support indicators

Works on the replica-aliased (compact) auxiliary problem. Node bounds come from
the conditional-gradient relaxation; incumbents from integral leaves, integral
relaxations and the rounding heuristic. Results are mapped back through kappa
and certified against the original problem.
"""

import heapq
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from src.core.criteria import DET_FLOOR, criterion_D, log_det, phi_from_log_det
from src.core.design import ExactDesign
from src.core.exceptions import InfeasibleDesignError
from src.core.problem import LASProblem, check_feasible, information_matrix
from src.reduction.auxiliary import AuxiliaryProblem, aux_objective, build_auxiliary, kappa
from src.solver.compact import CompactProblem, presolve
from src.solver.heuristics import rounding_incumbent
from src.solver.options import (
    IncumbentUpdate,
    NodeRecord,
    SolverOptions,
    SolverResult,
    SolverStatus,
    relative_gap,
)
from src.solver.relaxation import solve_relaxation

logger = logging.getLogger(__name__)

PRUNE_TOL = 1e-10
PROPAGATION_EPS = 1e-9
LOG_DET_FLOOR = math.log(DET_FLOOR)


@dataclass
class Node:
    node_id: int
    depth: int
    lower: np.ndarray
    upper: np.ndarray
    bound: float = math.inf


class IncumbentCell:
    """Best design found so far; updates are atomic and never decrease the value"""

    def __init__(self, m: int, start: float):
        self._lock = threading.Lock()
        self._m = m
        self._start = start
        self.counts: Optional[np.ndarray] = None
        self.value = -math.inf
        self.history: List[IncumbentUpdate] = []

    @property
    def exists(self) -> bool:
        return self.counts is not None

    def offer(self, counts: np.ndarray, value: float, node_id: int) -> bool:
        with self._lock:
            if self.counts is not None and not value > self.value:
                return False
            self.counts = np.asarray(counts, dtype=int).copy()
            self.value = value
            phi = phi_from_log_det(value, self._m)
            self.history.append(IncumbentUpdate(time.perf_counter() - self._start, node_id, phi))
        logger.info(f"New incumbent at node {node_id}: phi = {phi:.6f}")
        return True


def propagate(compact: CompactProblem, lower: np.ndarray, upper: np.ndarray) -> bool:
    """
    Tighten integer bounds in place from single-point rows (linking, replication
    bounds) and the size row. Returns False when the box becomes empty.
    """
    n, N = compact.n, compact.N
    for _ in range(4 * n + 10):
        changed = False
        for i, cw, cs, rhs in compact.pair_rows:
            s = n + i
            if cw != 0.0:
                limit = (rhs - min(cs * lower[s], cs * upper[s])) / cw
                if cw > 0.0:
                    value = math.floor(limit + PROPAGATION_EPS)
                    if value < upper[i]:
                        upper[i], changed = value, True
                else:
                    value = math.ceil(limit - PROPAGATION_EPS)
                    if value > lower[i]:
                        lower[i], changed = value, True
            if cs != 0.0:
                limit = (rhs - min(cw * lower[i], cw * upper[i])) / cs
                if cs > 0.0:
                    value = math.floor(limit + PROPAGATION_EPS)
                    if value < upper[s]:
                        upper[s], changed = value, True
                else:
                    value = math.ceil(limit - PROPAGATION_EPS)
                    if value > lower[s]:
                        lower[s], changed = value, True
            if lower[i] > upper[i] or lower[s] > upper[s]:
                return False

        counts_lo, counts_hi = lower[:n], upper[:n]
        total_lo, total_hi = float(counts_lo.sum()), float(counts_hi.sum())
        if total_lo > N or total_hi < N:
            return False
        tight_hi = np.minimum(counts_hi, N - (total_lo - counts_lo))
        tight_lo = np.maximum(counts_lo, N - (total_hi - counts_hi))
        if np.any(tight_hi < counts_hi) or np.any(tight_lo > counts_lo):
            upper[:n], lower[:n] = tight_hi, tight_lo
            changed = True
        if np.any(lower > upper):
            return False
        if not changed:
            return True
    return bool(np.all(lower <= upper))


class BranchAndBound:
    """One search over a compact problem"""

    def __init__(self, compact: CompactProblem, options: SolverOptions):
        self.compact = compact
        self.options = options
        self.start = time.perf_counter()
        self.incumbent = IncumbentCell(compact.m, self.start)
        self.node_log: List[NodeRecord] = []
        self.gap_pruned_bound = -math.inf
        self.root_bound: Optional[float] = None
        self.nodes = 0
        self._next_id = 0

    # ------------------------------------------------------------------
    def _new_id(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def _dominated(self, bound: float) -> bool:
        """Node cannot contain a strictly better design"""
        if not self.incumbent.exists:
            return False
        value = self.incumbent.value
        if bound <= LOG_DET_FLOOR:
            return True
        if value == -math.inf:
            return False
        return bound <= value + PRUNE_TOL * (1.0 + abs(value))

    def _gap_dominated(self, bound: float) -> bool:
        """Node cannot improve the incumbent by more than the gap tolerance"""
        if self.options.gap <= 0.0 or not self.incumbent.exists or self.incumbent.value == -math.inf:
            return False
        m = self.compact.m
        return relative_gap(phi_from_log_det(self.incumbent.value, m), phi_from_log_det(bound, m)) <= self.options.gap

    def _offer(self, counts: np.ndarray, node_id: int) -> None:
        counts = np.rint(counts).astype(int)
        if self.compact.is_feasible(counts):
            self.incumbent.offer(counts, self.compact.log_det(counts), node_id)

    def _children(self, node: Node, lower, upper, var: int, split: float, bound: float) -> List[Node]:
        left_upper = upper.copy()
        left_upper[var] = math.floor(split)
        right_lower = lower.copy()
        right_lower[var] = math.floor(split) + 1
        depth = node.depth + 1
        return [Node(-1, depth, lower.copy(), left_upper, bound),
                Node(-1, depth, right_lower, upper.copy(), bound)]

    def _process(self, node: Node) -> Tuple[List[Node], str, float]:
        compact, options = self.compact, self.options
        n = compact.n
        lower, upper = node.lower.copy(), node.upper.copy()
        if not propagate(compact, lower, upper):
            return [], 'infeasible', -math.inf

        if np.all(lower == upper):
            counts = lower[:n].astype(int)
            if np.array_equal(lower[n:], (counts > 0).astype(float)) and compact.is_feasible(counts):
                self._offer(counts, node.node_id)
                return [], 'leaf', compact.log_det(counts)
            return [], 'infeasible', -math.inf

        relaxation = solve_relaxation(compact, lower, upper, options)
        if relaxation.infeasible:
            return [], 'infeasible', -math.inf
        bound = min(relaxation.bound, node.bound)
        if bound <= LOG_DET_FLOOR:
            bound = -math.inf
        if node.depth == 0:
            self.root_bound = bound
            logger.info(f"Root relaxation: bound phi <= {phi_from_log_det(bound, compact.m):.6f} "
                        f"({relaxation.iterations} iterations, gap {relaxation.gap:.2e})")
        if self._dominated(bound):
            return [], 'pruned', bound

        if node.depth == 0 or node.node_id % options.heuristic_stride == 0:
            design = rounding_incumbent(relaxation, compact, options.int_tol)
            if design is not None:
                self._offer(np.array(design.counts), node.node_id)

        x = relaxation.x
        free = lower < upper
        fraction = np.abs(x - np.rint(x))
        fractional = free & (fraction > options.int_tol)
        if not np.any(fractional):
            self._offer(x[:n], node.node_id)
            if self._dominated(bound):
                return [], 'closed', bound
            width = np.where(free, upper - lower, -1.0)
            var = int(np.argmax(width))
            return self._children(node, lower, upper, var, (lower[var] + upper[var]) / 2.0, bound), 'branched', bound

        indicators = np.nonzero(fractional[n:])[0]
        if indicators.size:
            var = n + int(indicators[np.argmax(fraction[n + indicators])])
        else:
            counts = np.nonzero(fractional[:n])[0]
            var = int(counts[np.argmax(fraction[counts])])
        return self._children(node, lower, upper, var, x[var], bound), 'branched', bound

    # ------------------------------------------------------------------
    def _push(self, heap, node: Node):
        node.node_id = self._new_id()
        heapq.heappush(heap, (-node.bound, -node.depth, node.node_id, node))

    def _limit_reached(self) -> Optional[SolverStatus]:
        options = self.options
        if options.node_limit and self.nodes >= options.node_limit:
            return SolverStatus.NODE_LIMIT
        if options.time_limit and time.perf_counter() - self.start >= options.time_limit:
            return SolverStatus.TIME_LIMIT
        return None

    def run(self) -> Tuple[SolverStatus, float]:
        """Search until the tree is exhausted, the gap closes or a limit hits; returns (status, log-det upper bound)"""
        compact, options = self.compact, self.options
        heap: list = []
        self._push(heap, Node(-1, 0, compact.lower.copy(), compact.upper.copy()))
        batch_size = options.threads if options.parallel else 1
        executor = ThreadPoolExecutor(max_workers=options.threads) if options.parallel else None
        status = None
        try:
            while heap:
                status = self._limit_reached()
                if status is not None:
                    break
                top = -heap[0][0]
                if self._dominated(top):
                    heap.clear()
                    break
                if self._gap_dominated(top):
                    logger.info("Proven gap within tolerance, stopping")
                    status = SolverStatus.GAP_LIMIT
                    break

                batch = []
                while heap and len(batch) < batch_size:
                    _, _, _, node = heapq.heappop(heap)
                    if self._dominated(node.bound):
                        self._record(node, 'pruned', node.bound)
                        continue
                    if self._gap_dominated(node.bound):
                        self.gap_pruned_bound = max(self.gap_pruned_bound, node.bound)
                        self._record(node, 'pruned', node.bound)
                        continue
                    batch.append(node)
                if not batch:
                    continue

                if executor is not None and len(batch) > 1:
                    outcomes = list(executor.map(self._process, batch))
                else:
                    outcomes = [self._process(node) for node in batch]

                for node, (children, action, bound) in zip(batch, outcomes):
                    self.nodes += 1
                    self._record(node, action, bound)
                    logger.debug(f"Node {node.node_id} (depth {node.depth}): {action}, bound {bound:.6f}")
                    for child in children:
                        self._push(heap, child)
        finally:
            if executor is not None:
                executor.shutdown(wait=True)

        open_bound = max((-key for key, _, _, _ in heap), default=-math.inf)
        upper = max(self.incumbent.value, open_bound, self.gap_pruned_bound)
        if status is None:
            if not self.incumbent.exists:
                status = SolverStatus.INFEASIBLE
            elif self.gap_pruned_bound > self.incumbent.value + PRUNE_TOL * (1.0 + abs(self.incumbent.value)):
                status = SolverStatus.GAP_LIMIT
            else:
                status = SolverStatus.OPTIMAL
                upper = self.incumbent.value
        return status, upper

    def _record(self, node: Node, action: str, bound: float):
        if self.options.record_nodes:
            self.node_log.append(NodeRecord(node.node_id, node.depth, node.lower.copy(),
                                            node.upper.copy(), bound, action))


def branch_and_bound(problem: Union[AuxiliaryProblem, CompactProblem],
                     options: Optional[SolverOptions] = None) -> SolverResult:
    """Exact solve of an auxiliary problem; the design is returned in primary coordinates"""
    options = options or SolverOptions.from_config()
    compact = problem if isinstance(problem, CompactProblem) else presolve(problem)
    aux = compact.aux
    logger.info(f"Branch-and-bound: n={compact.n}, N={compact.N}, m={compact.m}, "
                f"{compact.b_ub.size} <= rows, {compact.b_eq.size} = rows")

    search = BranchAndBound(compact, options)
    status, upper = search.run()
    wall_time = time.perf_counter() - search.start

    result = SolverResult(status=status, nodes=search.nodes, wall_time=wall_time,
                          incumbent_history=search.incumbent.history, node_log=search.node_log)
    if search.root_bound is not None:
        result.root_bound = phi_from_log_det(search.root_bound, compact.m)

    if search.incumbent.exists:
        design = kappa(compact.to_aux_design(search.incumbent.counts), aux)
        if aux.origin is not None:
            report = check_feasible(design, aux.origin)
            if not report.feasible:
                raise InfeasibleDesignError(f"Solver produced an infeasible design: {report.summary()}")
            M = information_matrix(aux.origin, design)
            result.log_det, result.phi = log_det(M), criterion_D(M)
        else:
            result.log_det = search.incumbent.value
            result.phi = aux_objective(compact.to_aux_design(search.incumbent.counts), aux)
        result.design = design

    result.upper_bound = max(phi_from_log_det(upper, compact.m), result.phi)
    result.gap = relative_gap(result.phi, result.upper_bound) if result.feasible else math.inf
    logger.info(f"Branch-and-bound finished: {status.value}, phi = {result.phi:.6f}, "
                f"bound = {result.upper_bound:.6f}, gap = {result.gap:.2e}, "
                f"{result.nodes} nodes, {wall_time:.2f}s")
    return result


def solve(problem: LASProblem, options: Optional[SolverOptions] = None, route: Optional[str] = None,
          oracle: bool = False) -> SolverResult:
    """Compile and solve a LAS problem; oracle=True enumerates instead"""
    options = options or SolverOptions.from_config()
    if oracle:
        from src.solver.brute_force import brute_force
        return brute_force(problem, cap=options.brute_force_cap)
    return branch_and_bound(build_auxiliary(problem, route=route), options)
