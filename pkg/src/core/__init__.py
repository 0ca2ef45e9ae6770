"""Design data model, LAS constraints, D-criterion and feasibility"""

from .design import DesignPoint, DesignSpace, ExactDesign
from .constraints import LinearSparsityConstraint, Sense, BUILDERS
from .criteria import criterion_D, log_det
from .problem import (
    Criterion,
    FeasibilityReport,
    LASProblem,
    check_feasible,
    d_efficiency,
    information_matrix,
)

__all__ = ['DesignPoint', 'DesignSpace', 'ExactDesign', 'LinearSparsityConstraint', 'Sense',
           'BUILDERS', 'criterion_D', 'log_det', 'Criterion', 'FeasibilityReport', 'LASProblem',
           'check_feasible', 'd_efficiency', 'information_matrix']
