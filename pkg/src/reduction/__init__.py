"""Compilation of LAS problems into auxiliary linear-row problems"""

from .auxiliary import (
    AuxiliaryDesign,
    AuxiliaryProblem,
    AuxPoint,
    AuxRow,
    aux_objective,
    aux_violations,
    build_auxiliary,
    is_aux_feasible,
    kappa,
    lift,
)
from .export import export_auxiliary, read_auxiliary

__all__ = ['AuxiliaryDesign', 'AuxiliaryProblem', 'AuxPoint', 'AuxRow', 'aux_objective',
           'aux_violations', 'build_auxiliary', 'is_aux_feasible', 'kappa', 'lift',
           'export_auxiliary', 'read_auxiliary']
