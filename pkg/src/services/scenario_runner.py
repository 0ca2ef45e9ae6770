"""
Scenario Runner Service
Loads a scenario, solves it, evaluates the report columns and writes the outputs
"""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

from src.config import Config
from src.core.design import ExactDesign
from src.core.exceptions import ProblemFileError
from src.services.report_builder import Report, ReportRow, evaluate_row
from src.solver.branch_and_bound import solve
from src.solver.options import SolverOptions, SolverResult
from src.utils.problem_loader import Scenario, load_design, load_problem, load_scenario, save_design

logger = logging.getLogger(__name__)


def run_scenario(path: Union[str, Path, Scenario], options: Optional[SolverOptions] = None,
                 oracle: bool = False, output_dir: Optional[Union[str, Path]] = None, plot: Optional[bool] = None,
                 route: Optional[str] = None) -> Tuple[Report, SolverResult]:
    """
    Solve one scenario file.

    Args:
        path: scenario JSON, or a Scenario already loaded from one
        options: solver options; scenario-level solver settings fill unset fields
        oracle: enumerate instead of branch-and-bound
        output_dir: where report (txt, csv), design CSV and plot go; defaults to
            the scenario's report.output_dir, then Config.RESULTS_DIR
        plot: force the SVG plot on or off
    """
    scenario = path if isinstance(path, Scenario) else load_scenario(path)
    problem = load_problem(scenario.problem_path)
    if options is None:
        options = SolverOptions.from_config(**scenario.solver)
    logger.info(f"Scenario {scenario.name}: n={problem.n}, N={problem.N}, "
                f"{len(problem.constraints)} constraints")

    result = solve(problem, options, route=route, oracle=oracle)

    report = Report()
    if result.design is not None:
        baseline = load_design(scenario.baseline_path, problem.n) if scenario.baseline_path else None
        report.add(evaluate_row(problem, result.design, baseline, scenario=scenario.name,
                                status=result.status.value))
    else:
        report.add(ReportRow(scenario=scenario.name, support="", counts="", phi=0.0, feasible=False,
                             status=result.status.value))

    out = Path(output_dir or scenario.output_dir or Config.RESULTS_DIR)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{scenario.name}_report.txt").write_text(report.to_text() + "\n")
    report.to_csv(out / f"{scenario.name}_report.csv")
    if result.design is not None:
        save_design(result.design, problem.space, out / f"{scenario.name}_design.csv")
        if scenario.plot if plot is None else plot:
            from src.visualization.design_plot import emit_plot
            emit_plot(result.design, problem.space, out / f"{scenario.name}_design.svg",
                      title=scenario.name)
    logger.info(f"Scenario {scenario.name}: {result.status.value}, phi = {result.phi:.4f}")
    return report, result


def evaluate_design(design: Union[str, Path, ExactDesign], problem_path: Union[str, Path],
                    baseline: Optional[Union[str, Path, ExactDesign]] = None, name: str = "") -> ReportRow:
    """Report columns for a given design, no solving"""
    problem = load_problem(problem_path)
    if not isinstance(design, ExactDesign):
        name = name or Path(design).stem
        design = load_design(design, problem.n)
    if baseline is not None and not isinstance(baseline, ExactDesign):
        baseline = load_design(baseline, problem.n)
    return evaluate_row(problem, design, baseline, scenario=name or problem.name)


def evaluate_scenario(path: Union[str, Path]) -> ReportRow:
    """Evaluate a scenario's bundled reference design against its problem"""
    scenario = load_scenario(path)
    if scenario.reference_path is None:
        raise ProblemFileError(scenario.path, "scenario has no reference design", field="reference")
    return evaluate_design(scenario.reference_path, scenario.problem_path, scenario.baseline_path,
                           name=scenario.name)
