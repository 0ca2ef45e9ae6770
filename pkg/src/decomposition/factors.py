"""
Rank-one factorizations H = sum_j f_j f_j^T of elementary information matrices
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.core.criteria import validate_information_matrix
from src.core.exceptions import DesignError, InvalidMatrixError, RankBoundError

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9
SIGN_TOL = 1e-12

ROUTES = ('eigen', 'cholesky')


@dataclass(frozen=True, eq=False)
class RankFactors:
    """r factor vectors of length m, zero rows as padding"""
    vectors: np.ndarray  # (r, m)

    @property
    def r(self) -> int:
        return self.vectors.shape[0]

    @property
    def m(self) -> int:
        return self.vectors.shape[1]

    @property
    def rank(self) -> int:
        """Number of non-padding factors"""
        return int(np.count_nonzero(np.any(self.vectors != 0.0, axis=1)))

    def reconstruct(self) -> np.ndarray:
        return self.vectors.T @ self.vectors


def _orient(vector: np.ndarray) -> np.ndarray:
    """Make the first nonzero component non-negative"""
    scale = float(np.max(np.abs(vector))) if vector.size else 0.0
    if scale == 0.0:
        return vector
    for value in vector:
        if abs(value) > SIGN_TOL * scale:
            return -vector if value < 0 else vector
    return vector


def _check_rank_bound(r: int):
    if int(r) != r or r < 1:
        raise DesignError(f"Rank bound must be a positive integer, got {r}")


def eigen_factors(H, r: int) -> RankFactors:
    """sqrt(lambda_j) u_j for the r largest eigenpairs of H"""
    _check_rank_bound(r)
    H = validate_information_matrix(H)
    m = H.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(H)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues, eigenvectors = eigenvalues[order], eigenvectors[:, order]

    vectors = np.zeros((r, m))
    norm = float(np.max(np.abs(eigenvalues)))
    if norm == 0.0:
        return RankFactors(vectors=vectors)
    if eigenvalues[-1] < -RANK_TOL * norm:
        raise InvalidMatrixError(f"Matrix is indefinite (eigenvalue {eigenvalues[-1]:.3e})")

    trailing = eigenvalues[r:]
    if trailing.size and trailing[0] > RANK_TOL * norm:
        raise RankBoundError(
            f"Eigenvalue {trailing[0]:.6e} at position {r + 1} exceeds {RANK_TOL:g}*||H|| = "
            f"{RANK_TOL * norm:.3e}; rank is above the bound r={r}"
        )

    for j in range(min(r, m)):
        if eigenvalues[j] > 0.0:
            vectors[j] = _orient(np.sqrt(eigenvalues[j]) * eigenvectors[:, j])
    return RankFactors(vectors=vectors)


def pivoted_cholesky_factors(H, r: int, tol: float = RANK_TOL) -> RankFactors:
    """
    Greedy diagonal-pivot Cholesky: repeatedly peel off the column of the
    largest residual diagonal until it falls below tol * (initial maximum).
    Ties go to the lowest index.
    """
    _check_rank_bound(r)
    residual = validate_information_matrix(H).copy()
    m = residual.shape[0]
    vectors = np.zeros((r, m))
    initial = float(np.max(np.diag(residual)))
    if initial <= 0.0:
        return RankFactors(vectors=vectors)

    count = 0
    for _ in range(m):
        diagonal = np.diag(residual)
        pivot = int(np.argmax(diagonal))
        if diagonal[pivot] <= tol * initial:
            break
        if count == r:
            raise RankBoundError(
                f"Pivot {count + 1} at index {pivot + 1} has residual {diagonal[pivot]:.6e} > "
                f"{tol:g}*max diag; rank is above the bound r={r}"
            )
        column = residual[:, pivot] / np.sqrt(diagonal[pivot])
        residual = residual - np.outer(column, column)
        vectors[count] = _orient(column)
        count += 1
    return RankFactors(vectors=vectors)


def factorize(H, r: int, route: str = 'eigen') -> RankFactors:
    """Dispatch to the selected factorization route"""
    if route == 'eigen':
        return eigen_factors(H, r)
    if route == 'cholesky':
        return pivoted_cholesky_factors(H, r)
    raise DesignError(f"Unknown decomposition route: {route!r} (expected one of {ROUTES})")


def factor_stack(matrices: np.ndarray, r: int, route: str = 'eigen') -> np.ndarray:
    """Factor every H(x_i); returns an (n, r, m) array"""
    factors = []
    for i, H in enumerate(matrices):
        try:
            factors.append(factorize(H, r, route).vectors)
        except RankBoundError as e:
            raise RankBoundError(f"Point {i + 1}: {e}") from e
    logger.debug(f"Factored {len(factors)} elementary matrices via {route} (r={r})")
    return np.array(factors).reshape(len(factors), r, -1) if factors else np.zeros((0, r, 0))
