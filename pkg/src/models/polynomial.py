"""
Univariate-response polynomial regression: f(x) = (1, x, ..., x^d), H = f f^T
"""

from typing import Any, Dict

import numpy as np

from src.core.exceptions import DesignError
from src.models.base import InformationModel, ModelType


class PolynomialModel(InformationModel):
    """Rank-one model on the first coordinate"""

    model_type = ModelType.POLYNOMIAL

    def __init__(self, degree: int = 1):
        if int(degree) != degree or degree < 0:
            raise DesignError(f"Polynomial degree must be a non-negative integer, got {degree}")
        super().__init__(m=int(degree) + 1, rank_bound=1)
        self.degree = int(degree)

    def regressor(self, coordinates) -> np.ndarray:
        x = float(np.atleast_1d(coordinates)[0])
        return x ** np.arange(self.degree + 1)

    def elementary_info(self, coordinates) -> np.ndarray:
        f = self.regressor(coordinates)
        return np.outer(f, f)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.model_type.value, "degree": self.degree}
