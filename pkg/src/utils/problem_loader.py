"""
Problem, scenario and design file loading

Problem files (JSON) describe the design space, the information model, the LAS
constraints (named builders or raw rows) and the design size N. A problem may
extend another one, appending its constraints to the base set. Scenario files
point at a problem and optionally at a baseline design and a reference design.
Design files are JSON {"counts": [[index, count], ...]} or CSV with the header
index,label,dose,count.
"""

import inspect
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.constraints import BUILDERS, LinearSparsityConstraint
from src.core.design import DesignSpace, ExactDesign
from src.core.exceptions import DesignError, ProblemFileError
from src.core.problem import Criterion, LASProblem
from src.models import CRModel, CRParameters, InformationModel, PolynomialModel, RawMatrixModel
from src.models.continuation_ratio import cr_budget, failure_limit

logger = logging.getLogger(__name__)

# Builders that need the information model (coefficients localized at theta0)
MODEL_BUILDERS = {
    'failure_limit': failure_limit,
    'cr_budget': cr_budget,
}

DESIGN_CSV_COLUMNS = ['index', 'label', 'dose', 'count']


# ---------------------------------------------------------------------------
# schemas
# ---------------------------------------------------------------------------

class GridSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    start: float
    stop: float
    num: int = Field(ge=1)


class SpaceSchema(BaseModel):
    """Either explicit points or an equidistant grid"""
    model_config = ConfigDict(extra='forbid')

    points: Optional[List[Union[float, List[float]]]] = None
    labels: Optional[List[str]] = None
    grid: Optional[GridSchema] = None

    @model_validator(mode='after')
    def one_source(self):
        if (self.points is None) == (self.grid is None):
            raise ValueError("give exactly one of 'points' or 'grid'")
        if self.labels is not None and self.grid is not None:
            raise ValueError("'labels' only apply to explicit points")
        return self


class ModelSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    type: Literal['continuation_ratio', 'polynomial', 'raw_matrices']
    theta: Optional[List[float]] = None          # continuation_ratio: (a1, a2, b1, b2)
    degree: int = Field(default=1, ge=0)          # polynomial
    matrices: Optional[List[List[List[float]]]] = None  # raw_matrices
    rank: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode='after')
    def check_fields(self):
        if self.type == 'continuation_ratio' and self.theta is not None and len(self.theta) != 4:
            raise ValueError("theta needs 4 values (a1, a2, b1, b2)")
        if self.type == 'raw_matrices' and not self.matrices:
            raise ValueError("raw_matrices needs 'matrices'")
        return self


class ConstraintSchema(BaseModel):
    """A named builder with arguments, or a raw row a.w + c.s (<= | =) b"""
    model_config = ConfigDict(extra='forbid')

    builder: Optional[str] = None
    args: Dict[str, Any] = Field(default_factory=dict)
    a: Optional[List[float]] = None
    c: Optional[List[float]] = None
    b: Optional[float] = None
    sense: str = "<="
    name: str = ""

    @model_validator(mode='after')
    def builder_or_row(self):
        if self.builder is not None:
            if self.builder not in BUILDERS and self.builder not in MODEL_BUILDERS:
                known = ', '.join(sorted(list(BUILDERS) + list(MODEL_BUILDERS)))
                raise ValueError(f"unknown builder {self.builder!r} (known: {known})")
            if self.a is not None or self.c is not None or self.b is not None:
                raise ValueError("a builder entry cannot also give a, c or b")
        elif self.b is None or (self.a is None and self.c is None):
            raise ValueError("a raw row needs 'b' and at least one of 'a', 'c'")
        return self


class ProblemSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str = ""
    extends: Optional[str] = None
    N: Optional[int] = Field(default=None, ge=0)
    criterion: Literal['D'] = 'D'
    space: Optional[SpaceSchema] = None
    model: Optional[ModelSchema] = None
    constraints: List[ConstraintSchema] = Field(default_factory=list)

    @model_validator(mode='after')
    def complete_or_extending(self):
        if self.extends is None:
            missing = [k for k in ('N', 'space', 'model') if getattr(self, k) is None]
            if missing:
                raise ValueError(f"missing {', '.join(missing)} (required unless 'extends' is given)")
        return self


class ReportSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    plot: bool = False
    output_dir: Optional[str] = None


class SolverSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    gap: Optional[float] = Field(default=None, ge=0)
    time_limit: Optional[float] = Field(default=None, ge=0)
    node_limit: Optional[int] = Field(default=None, ge=0)
    threads: Optional[int] = Field(default=None, ge=1)
    deterministic: Optional[bool] = None


class ScenarioSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str
    problem: str
    baseline: Optional[str] = None
    reference: Optional[str] = None
    report: ReportSchema = Field(default_factory=ReportSchema)
    solver: SolverSchema = Field(default_factory=SolverSchema)


class DesignSchema(BaseModel):
    model_config = ConfigDict(extra='forbid')

    counts: List[List[int]]
    n: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode='after')
    def pairs(self):
        for k, pair in enumerate(self.counts):
            if len(pair) != 2:
                raise ValueError(f"counts[{k}] must be [index, count]")
            if pair[1] < 0:
                raise ValueError(f"counts[{k}] has a negative count")
        return self


@dataclass
class Scenario:
    """Scenario with file references resolved against the scenario's directory"""
    name: str
    path: Path
    problem_path: Path
    baseline_path: Optional[Path] = None
    reference_path: Optional[Path] = None
    plot: bool = False
    output_dir: Optional[Path] = None
    solver: Dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _read_json(path: Path) -> Any:
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemFileError(path, f"cannot read file: {e.strerror or e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(path, e.msg, line=e.lineno, column=e.colno)


def _validate(schema, data: Any, path: Path):
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        location = '.'.join(str(part) for part in first['loc'])
        raise ProblemFileError(path, first['msg'], field=location or None)


def _build_space(entry: SpaceSchema) -> DesignSpace:
    if entry.grid is not None:
        return DesignSpace.grid(entry.grid.start, entry.grid.stop, entry.grid.num)
    return DesignSpace.from_values(entry.points, labels=entry.labels)


def _build_model(entry: ModelSchema) -> InformationModel:
    if entry.type == 'continuation_ratio':
        return CRModel() if entry.theta is None else CRModel(CRParameters(*entry.theta))
    if entry.type == 'polynomial':
        return PolynomialModel(entry.degree)
    return RawMatrixModel(entry.matrices, rank_bound=entry.rank)


def _call_builder(entry: ConstraintSchema, space: DesignSpace, model: InformationModel,
                  N: int) -> List[LinearSparsityConstraint]:
    args = dict(entry.args)
    if entry.name:
        args.setdefault('name', entry.name)
    if entry.builder in MODEL_BUILDERS:
        return MODEL_BUILDERS[entry.builder](space, model, **args)
    builder = BUILDERS[entry.builder]
    if 'n_trials' in inspect.signature(builder).parameters:
        args.setdefault('n_trials', N)
    return builder(space, **args)


def _build_constraints(entries: List[ConstraintSchema], space: DesignSpace, model: InformationModel,
                       N: int, path: Path, offset: int = 0) -> List[LinearSparsityConstraint]:
    constraints = []
    for k, entry in enumerate(entries):
        where = f"constraints.{offset + k}"
        try:
            if entry.builder is not None:
                constraints.extend(_call_builder(entry, space, model, N))
            else:
                a = entry.a if entry.a is not None else [0.0] * space.n
                c = entry.c if entry.c is not None else [0.0] * space.n
                constraints.append(LinearSparsityConstraint(a=a, c=c, b=entry.b, sense=entry.sense,
                                                            name=entry.name or f"row{offset + k + 1}"))
        except TypeError as e:
            raise ProblemFileError(path, f"bad builder arguments: {e}", field=f"{where}.args")
        except DesignError as e:
            raise ProblemFileError(path, str(e), field=where)
    return constraints


def _resolve(base: Path, reference: str) -> Path:
    candidate = Path(reference)
    return candidate if candidate.is_absolute() else (base.parent / candidate)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def load_problem(path: Union[str, Path], _seen: Optional[set] = None) -> LASProblem:
    """Parse a problem file into a LASProblem"""
    path = Path(path)
    seen = set() if _seen is None else _seen
    if path.resolve() in seen:
        raise ProblemFileError(path, "circular 'extends' chain", field="extends")
    seen.add(path.resolve())

    entry = _validate(ProblemSchema, _read_json(path), path)
    if entry.extends is not None:
        base = load_problem(_resolve(path, entry.extends), seen)
        if entry.space is not None or entry.model is not None:
            raise ProblemFileError(path, "an extending problem cannot redefine space or model", field="extends")
        N = base.N if entry.N is None else entry.N
        extra = _build_constraints(entry.constraints, base.space, base.model, N, path)
        problem = LASProblem(space=base.space, model=base.model, constraints=base.constraints + tuple(extra),
                             N=N, criterion=Criterion.D, name=entry.name or path.stem)
    else:
        try:
            space = _build_space(entry.space)
        except DesignError as e:
            raise ProblemFileError(path, str(e), field="space")
        try:
            model = _build_model(entry.model)
        except DesignError as e:
            raise ProblemFileError(path, str(e), field="model")
        constraints = _build_constraints(entry.constraints, space, model, entry.N, path)
        try:
            problem = LASProblem(space=space, model=model, constraints=tuple(constraints), N=entry.N,
                                 criterion=Criterion.D, name=entry.name or path.stem)
        except DesignError as e:
            raise ProblemFileError(path, str(e))

    logger.debug(f"Loaded problem {problem.name}: n={problem.n}, m={problem.m}, N={problem.N}, "
                 f"{len(problem.constraints)} constraints")
    return problem


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Parse a scenario file; referenced files must exist"""
    path = Path(path)
    entry = _validate(ScenarioSchema, _read_json(path), path)

    def existing(reference: Optional[str], name: str) -> Optional[Path]:
        if reference is None:
            return None
        resolved = _resolve(path, reference)
        if not resolved.exists():
            raise ProblemFileError(path, f"referenced file not found: {resolved}", field=name)
        return resolved

    output_dir = _resolve(path, entry.report.output_dir) if entry.report.output_dir else None
    return Scenario(
        name=entry.name,
        path=path,
        problem_path=existing(entry.problem, 'problem'),
        baseline_path=existing(entry.baseline, 'baseline'),
        reference_path=existing(entry.reference, 'reference'),
        plot=entry.report.plot,
        output_dir=output_dir,
        solver=entry.solver.model_dump(exclude_none=True),
    )


def load_design(path: Union[str, Path], n: int) -> ExactDesign:
    """Read a design file for a space of n points"""
    path = Path(path)
    if path.suffix.lower() == '.csv':
        return _load_design_csv(path, n)
    entry = _validate(DesignSchema, _read_json(path), path)
    if entry.n is not None and entry.n != n:
        raise ProblemFileError(path, f"design is for {entry.n} points, problem has {n}", field="n")
    for k, (index, _) in enumerate(entry.counts):
        if not 1 <= index <= n:
            raise ProblemFileError(path, f"point index {index} outside 1..{n}", field=f"counts.{k}")
    return ExactDesign.from_pairs(entry.counts, n)


def _load_design_csv(path: Path, n: int) -> ExactDesign:
    try:
        frame = pd.read_csv(path, comment='#')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ProblemFileError(path, f"cannot read design CSV: {e}")
    missing = [c for c in ('index', 'count') if c not in frame.columns]
    if missing:
        raise ProblemFileError(path, f"missing column(s) {', '.join(missing)}", line=1)
    pairs = []
    for row, (index, count) in enumerate(zip(frame['index'], frame['count'])):
        line = row + 2
        if pd.isna(index) or pd.isna(count) or float(index) != int(index) or float(count) != int(count):
            raise ProblemFileError(path, "index and count must be integers", line=line)
        if not 1 <= int(index) <= n:
            raise ProblemFileError(path, f"point index {int(index)} outside 1..{n}", line=line, field="index")
        if int(count) < 0:
            raise ProblemFileError(path, "negative count", line=line, field="count")
        pairs.append((int(index), int(count)))
    return ExactDesign.from_pairs(pairs, n)


def design_frame(design: ExactDesign, space: DesignSpace) -> pd.DataFrame:
    """Support points as rows of index, label, dose, count"""
    design.check_length(space)
    rows = [(i, space.points[i - 1].label, space.points[i - 1].value, c) for i, c in design.to_pairs()]
    return pd.DataFrame(rows, columns=DESIGN_CSV_COLUMNS)


def save_design(design: ExactDesign, space: DesignSpace, path: Union[str, Path]) -> Path:
    """Write a design as CSV (.csv) or JSON (anything else)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == '.csv':
        design_frame(design, space).to_csv(path, index=False)
    else:
        path.write_text(json.dumps({"n": design.n, "counts": [list(p) for p in design.to_pairs()]}, indent=2) + "\n")
    return path