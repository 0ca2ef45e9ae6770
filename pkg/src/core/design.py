"""
Design space and exact design data model
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import DimensionMismatchError, DesignError


@dataclass(frozen=True)
class DesignPoint:
    """Candidate trial condition"""
    index: int  # 1-based
    label: str
    coordinates: Tuple[float, ...]

    @property
    def value(self) -> float:
        """First coordinate (the dose for one-factor spaces)"""
        return self.coordinates[0]


@dataclass(frozen=True)
class DesignSpace:
    """Ordered finite set of candidate points x_1..x_n"""
    points: Tuple[DesignPoint, ...]

    def __post_init__(self):
        if len(self.points) < 1:
            raise DesignError("Design space needs at least one point")

        labels = set()
        for position, point in enumerate(self.points, start=1):
            if point.index != position:
                raise DesignError(
                    f"Point indices must run 1..n without gaps; got {point.index} at position {position}"
                )
            if point.label in labels:
                raise DesignError(f"Duplicate point label: {point.label}")
            labels.add(point.label)

        dims = {len(p.coordinates) for p in self.points}
        if len(dims) != 1:
            raise DesignError(f"Mixed coordinate dimensions in design space: {sorted(dims)}")

    @classmethod
    def from_values(cls, values: Iterable, labels: Optional[Sequence[str]] = None) -> 'DesignSpace':
        """Build a space from scalar or vector coordinates"""
        points = []
        values = list(values)
        if labels is not None and len(labels) != len(values):
            raise DimensionMismatchError(
                f"{len(labels)} labels given for {len(values)} points"
            )
        for i, value in enumerate(values, start=1):
            coords = tuple(float(v) for v in np.atleast_1d(value))
            if labels is not None:
                label = str(labels[i - 1])
            elif len(coords) == 1:
                label = _format_number(coords[0])
            else:
                label = f"x{i}"
            points.append(DesignPoint(index=i, label=label, coordinates=coords))
        return cls(points=tuple(points))

    @classmethod
    def grid(cls, start: float, stop: float, num: int) -> 'DesignSpace':
        """Equidistant one-factor grid, e.g. doses 0..100"""
        return cls.from_values(np.linspace(start, stop, int(num)))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return len(self.points[0].coordinates)

    @property
    def coordinates(self) -> np.ndarray:
        """n x d coordinate matrix"""
        return np.array([p.coordinates for p in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        """First coordinate of every point"""
        return self.coordinates[:, 0]

    @property
    def labels(self) -> List[str]:
        return [p.label for p in self.points]

    def index_of(self, label: str) -> int:
        """1-based index of the point with the given label"""
        for point in self.points:
            if point.label == label:
                return point.index
        raise KeyError(label)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class ExactDesign:
    """Integer replication counts w(x_i)"""
    counts: Tuple[int, ...]

    def __post_init__(self):
        cleaned = []
        for i, c in enumerate(self.counts, start=1):
            if isinstance(c, (float, np.floating)):
                if not float(c).is_integer():
                    raise DesignError(f"Count at point {i} is not an integer: {c}")
            value = int(c)
            if value < 0:
                raise DesignError(f"Count at point {i} is negative: {value}")
            cleaned.append(value)
        object.__setattr__(self, 'counts', tuple(cleaned))

    @classmethod
    def zeros(cls, n: int) -> 'ExactDesign':
        return cls(counts=(0,) * n)

    @classmethod
    def from_array(cls, counts) -> 'ExactDesign':
        return cls(counts=tuple(int(round(float(c))) for c in np.asarray(counts).ravel()))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, int]], n: int) -> 'ExactDesign':
        """Build from (1-based point index, count) pairs; repeated indices accumulate"""
        counts = [0] * n
        for index, count in pairs:
            if not 1 <= int(index) <= n:
                raise DimensionMismatchError(f"Point index {index} outside 1..{n}")
            counts[int(index) - 1] += int(count)
        return cls(counts=tuple(counts))

    def to_pairs(self) -> List[Tuple[int, int]]:
        """(1-based index, count) for every support point"""
        return [(i, c) for i, c in enumerate(self.counts, start=1) if c > 0]

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.counts, dtype=float)

    @property
    def support(self) -> np.ndarray:
        """Support indicator s_w as a 0/1 float vector"""
        return (np.array(self.counts) > 0).astype(float)

    @property
    def support_indices(self) -> List[int]:
        """0-based positions of support points"""
        return [i for i, c in enumerate(self.counts) if c > 0]

    @property
    def support_size(self) -> int:
        return len(self.support_indices)

    def check_length(self, space: DesignSpace):
        if self.n != space.n:
            raise DimensionMismatchError(
                f"Design has {self.n} counts but the design space has {space.n} points"
            )


def _format_number(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))
