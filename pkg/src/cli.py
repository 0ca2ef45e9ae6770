#!/usr/bin/env python3
"""
Command-line front end

    python -m src.cli solve data/scenarios/w0.json --time-limit 600
    python -m src.cli eval data/designs/w3.json data/problems/w3.json --baseline data/designs/w0.json
    python -m src.cli plot data/designs/w0.json data/problems/w0.json -o results/w0.svg
    python -m src.cli export data/problems/w5.json -o results/w5.aux

Exit codes: 0 success, 1 input or numerical error, 2 infeasible, 3 stopped by a limit.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.config import Config
from src.core.exceptions import DesignError
from src.reduction.auxiliary import build_auxiliary
from src.reduction.export import export_auxiliary
from src.services.report_builder import Report
from src.services.scenario_runner import evaluate_design, run_scenario
from src.solver.options import SolverOptions, SolverStatus
from src.utils.problem_loader import load_design, load_problem, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3


def exit_code(status: SolverStatus) -> int:
    if status is SolverStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    if status.limit_terminated:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    options = None
    overrides = dict(gap=args.gap, time_limit=args.time_limit, node_limit=args.node_limit,
                     threads=args.threads, deterministic=args.deterministic)
    if any(v is not None for v in overrides.values()):
        merged = {**scenario.solver, **{k: v for k, v in overrides.items() if v is not None}}
        options = SolverOptions.from_config(**merged)

    if args.export_aux:
        aux = build_auxiliary(load_problem(scenario.problem_path), route=args.route)
        export_auxiliary(aux, args.export_aux)
        print(f"Auxiliary problem written to {args.export_aux}")

    report, result = run_scenario(scenario, options=options, oracle=args.oracle,
                                  output_dir=args.output_dir, plot=args.plot or None, route=args.route)
    print(report.to_text())
    print(f"status: {result.status.value}  phi: {result.phi:.6f}  bound: {result.upper_bound:.6f}  "
          f"gap: {result.gap:.2e}  nodes: {result.nodes}  time: {result.wall_time:.2f}s")
    if len(result.ties) > 1:
        print(f"note: {len(result.ties)} designs attain the optimum")
    return exit_code(result.status)


def cmd_eval(args) -> int:
    row = evaluate_design(args.design, args.problem, baseline=args.baseline)
    report = Report().add(row)
    print(report.to_text())
    if args.csv:
        report.to_csv(args.csv)
    if not row.feasible:
        print(f"infeasible: {row.violations}")
    return EXIT_OK


def cmd_plot(args) -> int:
    from src.visualization.design_plot import emit_plot
    problem = load_problem(args.problem)
    design = load_design(args.design, problem.n)
    output = Path(args.output or Path(Config.RESULTS_DIR) / f"{Path(args.design).stem}.svg")
    svg, csv = emit_plot(design, problem.space, output, title=args.title or "")
    print(f"Plot written to {svg}, data to {csv}")
    return EXIT_OK


def cmd_export(args) -> int:
    aux = build_auxiliary(load_problem(args.problem), route=args.route)
    path = export_auxiliary(aux, args.output)
    print(f"Auxiliary problem ({aux.n_aux} variables, {aux.row_count} rows) written to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='las-design',
                                     description='Exact D-optimal designs under linear and sparsity constraints')
    parser.add_argument('--verbose', '-v', action='store_true', help='debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', help='solve a scenario file')
    solve.add_argument('scenario')
    solve.add_argument('--gap', type=float, help='relative Phi gap tolerance')
    solve.add_argument('--time-limit', type=float, help='seconds, 0 = unlimited')
    solve.add_argument('--node-limit', type=int, help='0 = unlimited')
    solve.add_argument('--threads', type=int)
    solve.add_argument('--deterministic', action=argparse.BooleanOptionalAction, default=None,
                       help='serial node processing with reproducible results')
    solve.add_argument('--oracle', action='store_true', help='enumerate all designs instead of branch-and-bound')
    solve.add_argument('--export-aux', metavar='PATH', help='also write the auxiliary problem')
    solve.add_argument('--route', choices=['eigen', 'cholesky'], help='factorization of H(x)')
    solve.add_argument('--output-dir', help='report directory (default: RESULTS_DIR)')
    solve.add_argument('--plot', action='store_true', help='write an SVG of the solution')
    solve.set_defaults(func=cmd_solve)

    evaluate = sub.add_parser('eval', help='evaluate a design file against a problem file')
    evaluate.add_argument('design')
    evaluate.add_argument('problem')
    evaluate.add_argument('--baseline', help='design file used for the efficiency column')
    evaluate.add_argument('--csv', help='also write the row as CSV')
    evaluate.set_defaults(func=cmd_eval)

    plot = sub.add_parser('plot', help='bar chart (SVG) and CSV of a design')
    plot.add_argument('design')
    plot.add_argument('problem', help='problem file supplying the design space')
    plot.add_argument('--output', '-o', help='SVG path')
    plot.add_argument('--title')
    plot.set_defaults(func=cmd_plot)

    export = sub.add_parser('export', help='write the auxiliary problem of a problem file')
    export.add_argument('problem')
    export.add_argument('--output', '-o', required=True)
    export.add_argument('--route', choices=['eigen', 'cholesky'])
    export.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    try:
        return args.func(args)
    except DesignError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
