"""
Model given directly by one PSD matrix per design point
"""

import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from src.core.criteria import validate_information_matrix
from src.core.design import DesignSpace
from src.core.exceptions import DimensionMismatchError, InvalidMatrixError, RankBoundError
from src.models.base import InformationModel, ModelType

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9


class RawMatrixModel(InformationModel):
    """Explicit H(x_i); rank(H(x_i)) <= r is verified at load"""

    model_type = ModelType.RAW_MATRICES

    def __init__(self, matrices: Sequence, rank_bound: Optional[int] = None):
        stack = np.asarray(matrices, dtype=float)
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise DimensionMismatchError(f"Expected a stack of square matrices, got shape {stack.shape}")
        n, m, _ = stack.shape
        ranks = []
        checked = np.empty_like(stack)
        for i in range(n):
            H = validate_information_matrix(stack[i])
            eigenvalues = np.linalg.eigvalsh(H)
            norm = float(np.max(np.abs(eigenvalues)))
            if norm > 0 and eigenvalues[0] < -RANK_TOL * norm:
                raise InvalidMatrixError(f"Matrix {i + 1} is indefinite (eigenvalue {eigenvalues[0]:.3e})")
            ranks.append(int(np.sum(eigenvalues > RANK_TOL * norm)) if norm > 0 else 0)
            checked[i] = H
        r = max(ranks) if rank_bound is None else int(rank_bound)
        offending = [i for i, rank in enumerate(ranks) if rank > r]
        if offending:
            i = offending[0]
            raise RankBoundError(f"Matrix {i + 1} has numerical rank {ranks[i]} > declared bound {r}")
        super().__init__(m=m, rank_bound=max(r, 1))
        self.matrices = checked
        logger.debug(f"Loaded {n} elementary matrices (m={m}, r={self.rank_bound})")

    def elementary_info(self, coordinates) -> np.ndarray:
        raise NotImplementedError("Raw matrices are indexed by point, use elementary_matrices()")

    def elementary_matrices(self, space: DesignSpace) -> np.ndarray:
        if space.n != self.matrices.shape[0]:
            raise DimensionMismatchError(
                f"Model has {self.matrices.shape[0]} matrices but the design space has {space.n} points"
            )
        return self.matrices.copy()

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.model_type.value, "rank": self.rank_bound,
                "matrices": self.matrices.tolist()}
