"""
Portable text encoding of auxiliary problems

Line-oriented and whitespace-insensitive; '#' starts a comment. Grammar
(indices are 1-based auxiliary indices, floats written with repr):

    LASAUX 1
    DIMS <n> <r> <m> <N>
    VAR <idx> <name> INT|BIN <lower> <upper>          one per aux point
    ROW <idx> <role> <name> <sense> <rhs> <k> <i>:<v> ...   linear rows, in order
    SIZE <sense> <rhs> <k> <i>:<v> ...
    REG <idx> <f_1> ... <f_m>                         one per aux point
    END

See docs/FORMATS.md.
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from src.core.constraints import Sense
from src.core.exceptions import ProblemFileError
from src.reduction.auxiliary import AuxiliaryProblem, AuxPoint, AuxRow, as_token

logger = logging.getLogger(__name__)

FORMAT_TAG = "LASAUX"
FORMAT_VERSION = 1


def _pairs(row: AuxRow) -> str:
    body = " ".join(f"{i + 1}:{v!r}" for i, v in zip(row.indices, row.values))
    return f"{len(row.indices)} {body}".rstrip()


def format_auxiliary(aux: AuxiliaryProblem) -> str:
    lines = [
        f"# auxiliary design problem: n'={aux.n_aux}, rows={aux.row_count}",
        f"{FORMAT_TAG} {FORMAT_VERSION}",
        f"DIMS {aux.n} {aux.r} {aux.m} {aux.N}",
    ]
    for idx, point in enumerate(aux.aux_points, start=1):
        if point.kind == 'label':
            lines.append(f"VAR {idx} {point.name} BIN 0 1")
        else:
            lines.append(f"VAR {idx} {point.name} INT 0 {aux.N}")
    for idx, row in enumerate(aux.linear_rows, start=1):
        lines.append(f"ROW {idx} {row.role} {as_token(row.name)} {row.sense.value} {row.rhs!r} {_pairs(row)}")
    lines.append(f"SIZE {aux.size_row.sense.value} {aux.size_row.rhs!r} {_pairs(aux.size_row)}")
    for idx, regressor in enumerate(aux.regressors, start=1):
        lines.append(f"REG {idx} " + " ".join(repr(float(v)) for v in regressor))
    lines.append("END")
    return "\n".join(lines) + "\n"


def export_auxiliary(aux: AuxiliaryProblem, path: Union[str, Path]) -> Path:
    """Write the auxiliary problem as portable text"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_auxiliary(aux))
    logger.info(f"Exported auxiliary problem ({aux.n_aux} variables, {aux.row_count} rows) to {path}")
    return path


class _Parser:
    def __init__(self, text: str, source: str):
        self.source = source
        self.lines = []
        for number, raw in enumerate(text.splitlines(), start=1):
            content = raw.split('#', 1)[0].split()
            if content:
                self.lines.append((number, content))

    def error(self, message: str, line: Optional[int] = None):
        return ProblemFileError(self.source, message, line=line)

    def number(self, token: str, kind, line: int):
        try:
            return kind(token)
        except ValueError:
            raise self.error(f"Expected {kind.__name__}, got {token!r}", line)

    def sparse(self, tokens: List[str], line: int):
        if not tokens:
            raise self.error("Missing coefficient count", line)
        k = self.number(tokens[0], int, line)
        pairs = tokens[1:]
        if len(pairs) != k:
            raise self.error(f"Row declares {k} coefficients but lists {len(pairs)}", line)
        indices, values = [], []
        for pair in pairs:
            index, sep, value = pair.partition(':')
            if not sep:
                raise self.error(f"Malformed coefficient {pair!r}, expected index:value", line)
            indices.append(self.number(index, int, line) - 1)
            values.append(self.number(value, float, line))
        return tuple(indices), tuple(values)

    def parse(self) -> AuxiliaryProblem:
        if not self.lines:
            raise self.error("Empty file")
        number, tokens = self.lines[0]
        if tokens[:1] != [FORMAT_TAG] or len(tokens) != 2 or self.number(tokens[1], int, number) != FORMAT_VERSION:
            raise self.error(f"Expected header '{FORMAT_TAG} {FORMAT_VERSION}'", number)

        dims = None
        points, rows, regressors = [], [], {}
        size_row = None
        ended = False
        for number, tokens in self.lines[1:]:
            keyword, args = tokens[0], tokens[1:]
            if ended:
                raise self.error("Content after END", number)
            if keyword == 'DIMS':
                if len(args) != 4:
                    raise self.error("DIMS needs n r m N", number)
                dims = tuple(self.number(a, int, number) for a in args)
            elif keyword == 'VAR':
                if len(args) != 5:
                    raise self.error("VAR needs idx name INT|BIN lower upper", number)
                if self.number(args[0], int, number) != len(points) + 1:
                    raise self.error("VAR indices must be consecutive from 1", number)
                points.append(self._point(args[1], args[2], number))
            elif keyword == 'ROW':
                if len(args) < 6:
                    raise self.error("ROW needs idx role name sense rhs k pairs...", number)
                if self.number(args[0], int, number) != len(rows) + 1:
                    raise self.error("ROW indices must be consecutive from 1", number)
                indices, values = self.sparse(args[5:], number)
                rows.append(AuxRow(indices, values, self.number(args[4], float, number),
                                   self._sense(args[3], number), args[1], args[2]))
            elif keyword == 'SIZE':
                if len(args) < 3:
                    raise self.error("SIZE needs sense rhs k pairs...", number)
                indices, values = self.sparse(args[2:], number)
                size_row = AuxRow(indices, values, self.number(args[1], float, number),
                                  self._sense(args[0], number), "size", "size")
            elif keyword == 'REG':
                if not args:
                    raise self.error("REG needs an index", number)
                regressors[self.number(args[0], int, number)] = [self.number(v, float, number) for v in args[1:]]
            elif keyword == 'END':
                ended = True
            else:
                raise self.error(f"Unknown keyword {keyword!r}", number)

        if dims is None or size_row is None or not ended:
            raise self.error("File must contain DIMS, SIZE and END")
        n, r, m, N = dims
        if len(points) != n * r + n:
            raise self.error(f"Expected {n * r + n} VAR lines, found {len(points)}")
        if sorted(regressors) != list(range(1, len(points) + 1)):
            raise self.error("REG lines must cover every variable exactly once")
        matrix = np.array([regressors[i] for i in range(1, len(points) + 1)], dtype=float)
        if matrix.shape != (len(points), m):
            raise self.error(f"REG lines must carry m={m} values each")
        for row in rows + [size_row]:
            if any(not 0 <= i < len(points) for i in row.indices):
                raise self.error(f"Row {row.role} references a variable outside 1..{len(points)}")

        return AuxiliaryProblem(n=n, r=r, m=m, N=N, aux_points=tuple(points), regressors=matrix,
                                linear_rows=tuple(rows), size_row=size_row)

    def _point(self, name: str, kind: str, line: int) -> AuxPoint:
        if kind == 'BIN' and name.startswith('z'):
            return AuxPoint('label', self.number(name[1:], int, line))
        if kind == 'INT' and name.startswith('x') and '_' in name:
            point, replica = name[1:].split('_', 1)
            return AuxPoint('replica', self.number(point, int, line), self.number(replica, int, line))
        raise self.error(f"Unrecognized variable {name!r} of type {kind}", line)

    def _sense(self, token: str, line: int) -> Sense:
        try:
            return Sense.parse(token)
        except ValueError as e:
            raise self.error(str(e), line)


def read_auxiliary(path: Union[str, Path]) -> AuxiliaryProblem:
    """Parse a file written by export_auxiliary"""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemFileError(str(path), f"Cannot read file: {e}")
    return _Parser(text, str(path)).parse()


def parse_auxiliary(text: str, source: str = "<string>") -> AuxiliaryProblem:
    return _Parser(text, source).parse()
