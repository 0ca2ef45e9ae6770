"""Exact solvers for LAS design problems"""

from .options import SolverOptions, SolverResult, SolverStatus, relative_gap
from .lp import BoundedSimplex, LPResult, LPStatus, solve_lp
from .compact import CompactProblem, presolve
from .relaxation import RelaxationResult, solve_relaxation
from .heuristics import largest_remainder, rounding_incumbent
from .branch_and_bound import BranchAndBound, branch_and_bound, solve
from .brute_force import brute_force, enumerate_auxiliary_feasible, enumerate_feasible

__all__ = [
    'SolverOptions', 'SolverResult', 'SolverStatus', 'relative_gap',
    'BoundedSimplex', 'LPResult', 'LPStatus', 'solve_lp',
    'CompactProblem', 'presolve',
    'RelaxationResult', 'solve_relaxation',
    'largest_remainder', 'rounding_incumbent',
    'BranchAndBound', 'branch_and_bound', 'solve',
    'brute_force', 'enumerate_auxiliary_feasible', 'enumerate_feasible',
]
