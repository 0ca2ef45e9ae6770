"""
Solver options, status and result types
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config import Config
from src.core.design import ExactDesign
from src.core.exceptions import DesignError


class SolverStatus(Enum):
    """How a solve terminated"""
    OPTIMAL = "optimal"
    GAP_LIMIT = "gap-limit"
    NODE_LIMIT = "node-limit"
    TIME_LIMIT = "time-limit"
    INFEASIBLE = "infeasible"

    @property
    def limit_terminated(self) -> bool:
        return self in (SolverStatus.NODE_LIMIT, SolverStatus.TIME_LIMIT)


@dataclass
class SolverOptions:
    """Branch-and-bound and relaxation settings; 0 means unlimited for limits"""
    gap: float = 1e-6
    int_tol: float = 1e-6
    node_limit: int = 0
    time_limit: float = 0.0
    deterministic: bool = True
    threads: int = 1
    relax_max_iter: int = 200
    relax_seed: int = 0
    lp_pricing: str = 'dantzig'
    brute_force_cap: int = 10_000_000
    record_nodes: bool = False
    heuristic_stride: int = 8

    def __post_init__(self):
        errors = []
        if not self.gap >= 0:
            errors.append(f"gap must be non-negative, got {self.gap}")
        if not 0 < self.int_tol < 0.5:
            errors.append(f"int_tol must be in (0, 0.5), got {self.int_tol}")
        if self.node_limit < 0:
            errors.append(f"node_limit must be >= 0, got {self.node_limit}")
        if self.time_limit < 0:
            errors.append(f"time_limit must be >= 0, got {self.time_limit}")
        if self.threads < 1:
            errors.append(f"threads must be >= 1, got {self.threads}")
        if self.relax_max_iter < 1:
            errors.append(f"relax_max_iter must be >= 1, got {self.relax_max_iter}")
        if self.lp_pricing not in ('bland', 'dantzig'):
            errors.append(f"lp_pricing must be 'bland' or 'dantzig', got {self.lp_pricing!r}")
        if self.brute_force_cap < 1:
            errors.append(f"brute_force_cap must be >= 1, got {self.brute_force_cap}")
        if self.heuristic_stride < 1:
            errors.append(f"heuristic_stride must be >= 1, got {self.heuristic_stride}")
        if errors:
            raise DesignError("Invalid solver options: " + "; ".join(errors))

    @classmethod
    def from_config(cls, **overrides) -> 'SolverOptions':
        """Defaults taken from Config, individual fields overridable"""
        values = dict(
            gap=Config.SOLVER_GAP,
            int_tol=Config.SOLVER_INT_TOL,
            node_limit=Config.SOLVER_NODE_LIMIT,
            time_limit=Config.SOLVER_TIME_LIMIT,
            deterministic=Config.SOLVER_DETERMINISTIC,
            threads=Config.SOLVER_THREADS,
            relax_max_iter=Config.RELAX_MAX_ITER,
            relax_seed=Config.RELAX_SEED,
            lp_pricing=Config.LP_PRICING,
            brute_force_cap=Config.BRUTE_FORCE_CAP,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    @property
    def parallel(self) -> bool:
        return self.threads > 1 and not self.deterministic


@dataclass
class NodeRecord:
    """One entry of the search log"""
    node_id: int
    depth: int
    lower: np.ndarray
    upper: np.ndarray
    bound: float        # log-det scale
    action: str         # branched | pruned | infeasible | leaf | closed


@dataclass
class IncumbentUpdate:
    elapsed: float
    node_id: int
    phi: float


@dataclass
class SolverResult:
    """Outcome of branch_and_bound or brute_force"""
    status: SolverStatus
    design: Optional[ExactDesign] = None
    phi: float = 0.0
    log_det: float = -math.inf
    upper_bound: float = math.inf      # Phi_D scale
    gap: float = math.inf
    nodes: int = 0
    wall_time: float = 0.0
    root_bound: Optional[float] = None  # Phi_D scale
    ties: List[ExactDesign] = field(default_factory=list)
    incumbent_history: List[IncumbentUpdate] = field(default_factory=list)
    node_log: List[NodeRecord] = field(default_factory=list)
    method: str = "branch-and-bound"

    @property
    def feasible(self) -> bool:
        return self.design is not None

    def summary(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "method": self.method,
            "phi": self.phi,
            "upper_bound": self.upper_bound,
            "gap": self.gap,
            "nodes": self.nodes,
            "wall_time": round(self.wall_time, 3),
            "design": self.design.to_pairs() if self.design is not None else None,
            "ties": len(self.ties),
        }


def relative_gap(phi: float, phi_bound: float) -> float:
    """(bound - value) / value on the Phi_D scale"""
    if phi_bound <= phi:
        return 0.0
    if phi <= 0.0:
        return math.inf
    return (phi_bound - phi) / phi


def design_key(counts) -> Tuple[int, ...]:
    return tuple(int(c) for c in counts)
