"""
Linear and sparsity (LAS) constraints and their named builders

A LAS row reads  sum_i a_i w(x_i) + sum_i c_i s_w(x_i)  (<= | =)  b,
where s_w is the support indicator of the design. Builders return rows in
normalized <= form; '=' rows are only produced by balance().
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.design import DesignSpace
from src.core.exceptions import ConstraintSpecError, DimensionMismatchError

logger = logging.getLogger(__name__)

Coefficients = Union[float, Sequence[float], np.ndarray]


class Sense(Enum):
    """Row sense"""
    LE = "<="
    EQ = "="

    @classmethod
    def parse(cls, value: Union[str, 'Sense']) -> 'Sense':
        if isinstance(value, Sense):
            return value
        aliases = {'<=': cls.LE, 'le': cls.LE, '≤': cls.LE, '=': cls.EQ, '==': cls.EQ, 'eq': cls.EQ}
        try:
            return aliases[str(value).strip().lower()]
        except KeyError:
            raise ConstraintSpecError(f"Unknown constraint sense: {value!r}")


@dataclass(frozen=True)
class LinearSparsityConstraint:
    """One LAS row over counts (a) and support indicators (c)"""
    a: Tuple[float, ...]
    c: Tuple[float, ...]
    b: float
    sense: Sense = Sense.LE
    name: str = ""

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        c = tuple(float(v) for v in self.c)
        if len(a) != len(c):
            raise DimensionMismatchError(
                f"Constraint {self.name or '<unnamed>'}: a has {len(a)} entries, c has {len(c)}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c)) and np.isfinite(self.b)):
            raise ConstraintSpecError(f"Constraint {self.name or '<unnamed>'} has non-finite coefficients")
        if not (any(a) or any(c)):
            raise ConstraintSpecError(f"Constraint {self.name or '<unnamed>'} has all-zero coefficients")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'c', c)
        object.__setattr__(self, 'b', float(self.b))
        object.__setattr__(self, 'sense', Sense.parse(self.sense))

    @property
    def n(self) -> int:
        return len(self.a)

    def evaluate(self, counts: np.ndarray, support: np.ndarray) -> float:
        """Left-hand side for a design"""
        return float(np.dot(self.a, counts) + np.dot(self.c, support))

    def normalized(self) -> List[Tuple[np.ndarray, np.ndarray, float]]:
        """The row as one or two <= rows"""
        a, c = np.array(self.a), np.array(self.c)
        if self.sense is Sense.EQ:
            return [(a, c, self.b), (-a, -c, -self.b)]
        return [(a, c, self.b)]


def normalized_rows(constraints: Iterable[LinearSparsityConstraint], n: int):
    """
    Stack constraints as <= rows.

    Returns:
        (A, C, b, source) where A, C are K' x n, b has length K' and source[k]
        is the position of the originating constraint.
    """
    a_rows, c_rows, rhs, source = [], [], [], []
    for k, constraint in enumerate(constraints):
        if constraint.n != n:
            raise DimensionMismatchError(
                f"Constraint {constraint.name or k} has {constraint.n} coefficients, expected {n}"
            )
        for a, c, b in constraint.normalized():
            a_rows.append(a)
            c_rows.append(c)
            rhs.append(b)
            source.append(k)
    if not rhs:
        return np.zeros((0, n)), np.zeros((0, n)), np.zeros(0), np.zeros(0, dtype=int)
    return np.array(a_rows), np.array(c_rows), np.array(rhs), np.array(source, dtype=int)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _vector(space: DesignSpace, values: Coefficients, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(space.n, float(arr))
    if arr.shape != (space.n,):
        raise DimensionMismatchError(f"{what} has {arr.size} entries, expected {space.n}")
    return arr


def _indices(space: DesignSpace, region: Iterable[int], what: str) -> List[int]:
    positions = []
    for index in region:
        if not 1 <= int(index) <= space.n:
            raise ConstraintSpecError(f"{what}: point index {index} outside 1..{space.n}")
        positions.append(int(index) - 1)
    return positions


def exclusion(space: DesignSpace, a: Coefficients, b: float, name: str = "exclusion") -> List[LinearSparsityConstraint]:
    """Resource-type row: a >= 0, b > 0"""
    a = _vector(space, a, name)
    if np.any(a < 0) or b <= 0:
        raise ConstraintSpecError(f"{name}: exclusion rows need a >= 0 and b > 0")
    return [LinearSparsityConstraint(a=a, c=np.zeros(space.n), b=b, name=name)]


def inclusion(space: DesignSpace, a: Coefficients, b: float, name: str = "inclusion") -> List[LinearSparsityConstraint]:
    """Row forcing trials: a <= 0, b < 0"""
    a = _vector(space, a, name)
    if np.any(a > 0) or b >= 0:
        raise ConstraintSpecError(f"{name}: inclusion rows need a <= 0 and b < 0")
    return [LinearSparsityConstraint(a=a, c=np.zeros(space.n), b=b, name=name)]


def mixed(space: DesignSpace, a: Coefficients, b: float, sense: str = "<=",
          name: str = "mixed") -> List[LinearSparsityConstraint]:
    """Row with both positive and negative count coefficients"""
    a = _vector(space, a, name)
    if not (np.any(a > 0) and np.any(a < 0)):
        raise ConstraintSpecError(f"{name}: mixed rows need coefficients of both signs")
    return [LinearSparsityConstraint(a=a, c=np.zeros(space.n), b=b, sense=Sense.parse(sense), name=name)]


def balance(space: DesignSpace, group_a: Iterable[int], group_b: Iterable[int],
            name: str = "balance") -> List[LinearSparsityConstraint]:
    """Equal allocation between two groups of points (1-based indices)"""
    a = np.zeros(space.n)
    first = _indices(space, group_a, name)
    second = _indices(space, group_b, name)
    if set(first) & set(second):
        raise ConstraintSpecError(f"{name}: groups overlap")
    a[first] = 1.0
    a[second] = -1.0
    return mixed(space, a, 0.0, sense="=", name=name)


def privacy(space: DesignSpace, region: Iterable[int], limit: float,
            name: str = "privacy") -> List[LinearSparsityConstraint]:
    """At most `limit` trials inside a region of the design space"""
    a = np.zeros(space.n)
    a[_indices(space, region, name)] = 1.0
    return exclusion(space, a, limit, name=name)


def direct_limit(space: DesignSpace, index: int, limit: float,
                 name: str = "direct") -> List[LinearSparsityConstraint]:
    """At most `limit` replications at a single point"""
    return privacy(space, [index], limit, name=f"{name}[{index}]")


def replication_limits(space: DesignSpace, lower: Coefficients, upper: Coefficients,
                       n_trials: Optional[int] = None,
                       name: str = "replication") -> List[LinearSparsityConstraint]:
    """
    Plain bounds L(x) <= w(x) <= U(x) at every point.

    Unlike support_replication_bounds, any L(x) > 0 forces x into the design.
    """
    lower = _vector(space, lower, f"{name} lower")
    upper = _vector(space, upper, f"{name} upper")
    _check_bounds(lower, upper, n_trials, name)
    rows = []
    zeros = np.zeros(space.n)
    for i in range(space.n):
        a = np.zeros(space.n)
        a[i] = -1.0
        rows.append(LinearSparsityConstraint(a=a, c=zeros, b=-lower[i], name=f"{name}_lo[{i + 1}]"))
    for i in range(space.n):
        a = np.zeros(space.n)
        a[i] = 1.0
        rows.append(LinearSparsityConstraint(a=a, c=zeros, b=upper[i], name=f"{name}_hi[{i + 1}]"))
    logger.debug(f"{name}: {len(rows)} plain bound rows")
    return rows


def max_support_size(space: DesignSpace, size: int, n_trials: Optional[int] = None,
                     name: str = "max_support") -> List[LinearSparsityConstraint]:
    """At most `size` distinct points: a = 0, c = 1, b = S"""
    _check_support_size(size, n_trials, name)
    return [LinearSparsityConstraint(a=np.zeros(space.n), c=np.ones(space.n), b=size, name=name)]


def min_support_size(space: DesignSpace, size: int, n_trials: Optional[int] = None,
                     name: str = "min_support") -> List[LinearSparsityConstraint]:
    """At least `size` distinct points: a = 0, c = -1, b = -S"""
    _check_support_size(size, n_trials, name)
    return [LinearSparsityConstraint(a=np.zeros(space.n), c=-np.ones(space.n), b=-size, name=name)]


def budget(space: DesignSpace, per_trial: Coefficients, overhead: Coefficients, limit: float,
           name: str = "budget") -> List[LinearSparsityConstraint]:
    """Support-influenced cost: per-trial cost a, one-off cost c per support point, budget B"""
    per_trial = _vector(space, per_trial, f"{name} per-trial cost")
    overhead = _vector(space, overhead, f"{name} overhead")
    if np.any(per_trial < 0) or np.any(overhead < 0):
        raise ConstraintSpecError(f"{name}: costs must be non-negative")
    if limit <= 0:
        raise ConstraintSpecError(f"{name}: budget must be positive, got {limit}")
    return [LinearSparsityConstraint(a=per_trial, c=overhead, b=limit, name=name)]


def separation_windows(space: DesignSpace, delta: int,
                       name: str = "separation") -> List[LinearSparsityConstraint]:
    """At most one support point in every window of `delta` consecutive points"""
    delta = int(delta)
    if not 2 <= delta <= space.n:
        raise ConstraintSpecError(f"{name}: window length must be in 2..{space.n}, got {delta}")
    rows = []
    zeros = np.zeros(space.n)
    for start in range(space.n - delta + 1):
        c = np.zeros(space.n)
        c[start:start + delta] = 1.0
        rows.append(LinearSparsityConstraint(a=zeros, c=c, b=1.0, name=f"{name}[{start + 1}]"))
    logger.debug(f"{name}: {len(rows)} windows of {delta} points")
    return rows


def support_replication_bounds(space: DesignSpace, lower: Coefficients, upper: Coefficients,
                               n_trials: Optional[int] = None,
                               name: str = "support_replication") -> List[LinearSparsityConstraint]:
    """
    Every point is used 0 times or between L(x) and U(x) times.

    Rows: -w(x_i) + L(x_i) s(x_i) <= 0 for all i, then w(x_i) - U(x_i) s(x_i) <= 0.
    """
    lower = _vector(space, lower, f"{name} lower")
    upper = _vector(space, upper, f"{name} upper")
    _check_bounds(lower, upper, n_trials, name)
    rows = []
    for i in range(space.n):
        a, c = np.zeros(space.n), np.zeros(space.n)
        a[i], c[i] = -1.0, lower[i]
        rows.append(LinearSparsityConstraint(a=a, c=c, b=0.0, name=f"{name}_lo[{i + 1}]"))
    for i in range(space.n):
        a, c = np.zeros(space.n), np.zeros(space.n)
        a[i], c[i] = 1.0, -upper[i]
        rows.append(LinearSparsityConstraint(a=a, c=c, b=0.0, name=f"{name}_hi[{i + 1}]"))
    logger.debug(f"{name}: {len(rows)} rows, replication in [{lower.min():g}, {upper.max():g}] when used")
    return rows


def _check_support_size(size: int, n_trials: Optional[int], name: str):
    if int(size) != size or size < 1:
        raise ConstraintSpecError(f"{name}: support size must be a positive integer, got {size}")
    if n_trials is not None and size > n_trials:
        raise ConstraintSpecError(f"{name}: support size {size} exceeds design size N={n_trials}")


def _check_bounds(lower: np.ndarray, upper: np.ndarray, n_trials: Optional[int], name: str):
    if np.any(lower < 0):
        raise ConstraintSpecError(f"{name}: lower bounds must be non-negative")
    bad = np.nonzero(lower > upper)[0]
    if bad.size:
        i = int(bad[0])
        raise ConstraintSpecError(f"{name}: L > U at point {i + 1} ({lower[i]} > {upper[i]})")
    if n_trials is not None and np.any(upper > n_trials):
        raise ConstraintSpecError(f"{name}: upper bound exceeds design size N={n_trials}")


BUILDERS = {
    'exclusion': exclusion,
    'inclusion': inclusion,
    'mixed': mixed,
    'balance': balance,
    'privacy': privacy,
    'direct_limit': direct_limit,
    'replication_limits': replication_limits,
    'max_support_size': max_support_size,
    'min_support_size': min_support_size,
    'budget': budget,
    'separation_windows': separation_windows,
    'support_replication_bounds': support_replication_bounds,
}
