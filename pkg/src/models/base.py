"""
Information models: elementary information matrices H(x) localized at a nominal parameter
"""

from enum import Enum
from typing import Any, Dict

import numpy as np

from src.core.design import DesignSpace


class ModelType(Enum):
    """Model tags used in problem files"""
    CONTINUATION_RATIO = "continuation_ratio"
    POLYNOMIAL = "polynomial"
    RAW_MATRICES = "raw_matrices"


class InformationModel:
    """Base class for all information models"""

    model_type: ModelType

    def __init__(self, m: int, rank_bound: int):
        self.m = m
        self.rank_bound = rank_bound

    def elementary_info(self, coordinates) -> np.ndarray:
        """H(x) for a single point given by its coordinates"""
        raise NotImplementedError

    def elementary_matrices(self, space: DesignSpace) -> np.ndarray:
        """Stack of H(x_i), shape (n, m, m)"""
        return np.array([self.elementary_info(p.coordinates) for p in space.points])

    def to_dict(self) -> Dict[str, Any]:
        """Problem-file representation"""
        return {"type": self.model_type.value}

    def __repr__(self):
        return f"{type(self).__name__}(m={self.m}, r={self.rank_bound})"
