"""
Report Builder Service
Per-design report rows (support, counts, Phi, efficiency, expected failures, cost)
collected into pandas tables
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import pandas as pd

from src.core.criteria import criterion_D
from src.core.design import ExactDesign
from src.core.exceptions import SingularDesignError
from src.core.problem import LASProblem, check_feasible, information_matrix
from src.models.continuation_ratio import CRModel, design_cost, expected_failures

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ['scenario', 'support', 'counts', 'phi', 'eff', 'expected_failures', 'cost',
                  'feasible', 'status']


@dataclass
class ReportRow:
    """One design evaluated against one problem"""
    scenario: str
    support: str            # support point labels, e.g. "23 32 33"
    counts: str             # matching replication counts
    phi: float
    eff: float = math.nan   # vs baseline; NaN without one
    expected_failures: float = math.nan
    cost: float = math.nan
    feasible: bool = True
    status: str = "evaluated"
    violations: str = ""


@dataclass
class Report:
    """Report over several scenarios, one row per design"""
    rows: List[ReportRow] = field(default_factory=list)

    def add(self, row: ReportRow) -> 'Report':
        self.rows.append(row)
        return self

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(r) for r in self.rows], columns=REPORT_COLUMNS + ['violations'])
        return frame[REPORT_COLUMNS]

    def to_text(self) -> str:
        """Plain-text table with 2-decimal numbers"""
        if not self.rows:
            return "(empty report)"
        return self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.2f}")

    def to_csv(self, path: Union[str, Path]) -> Path:
        """Full-precision CSV"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame([asdict(r) for r in self.rows])
        frame.to_csv(path, index=False, float_format='%.17g')
        logger.info(f"Report written to {path}")
        return path


def evaluate_row(problem: LASProblem, design: ExactDesign, baseline: Optional[ExactDesign] = None,
                 scenario: str = "", status: str = "evaluated") -> ReportRow:
    """Phi, efficiency, CR columns and a feasibility verdict, without solving"""
    design.check_length(problem.space)
    labels = [problem.space.points[i - 1].label for i, _ in design.to_pairs()]
    phi = criterion_D(information_matrix(problem, design))

    eff = math.nan
    if baseline is not None:
        baseline.check_length(problem.space)
        reference = criterion_D(information_matrix(problem, baseline))
        if reference == 0.0:
            raise SingularDesignError("Efficiency undefined: baseline design has a singular information matrix")
        eff = phi / reference

    failures = cost = math.nan
    if isinstance(problem.model, CRModel):
        theta = problem.model.theta0
        failures = expected_failures(design.counts, problem.space, theta)
        cost = design_cost(design.counts, problem.space, theta)

    report = check_feasible(design, problem)
    if not report.feasible:
        logger.debug(f"{scenario or problem.name}: {report.summary()}")
    return ReportRow(
        scenario=scenario or problem.name,
        support=" ".join(labels),
        counts=" ".join(str(c) for _, c in design.to_pairs()),
        phi=phi,
        eff=eff,
        expected_failures=failures,
        cost=cost,
        feasible=report.feasible,
        status=status,
        violations="" if report.feasible else report.summary(),
    )
