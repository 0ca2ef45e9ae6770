"""
D-criterion evaluation on information matrices
"""

import math

import numpy as np

from src.core.exceptions import InvalidMatrixError

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-9
EIGEN_FLOOR = 1e-12
DET_FLOOR = 1e-300


def validate_information_matrix(M) -> np.ndarray:
    """Check squareness, symmetry and positive semidefiniteness; return the symmetrized matrix"""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidMatrixError(f"Information matrix must be square and non-empty, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrixError("Information matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(M))))
    asymmetry = float(np.max(np.abs(M - M.T)))
    if asymmetry > SYMMETRY_TOL * scale:
        raise InvalidMatrixError(f"Information matrix is not symmetric (max |M - M^T| = {asymmetry:.3e})")
    return 0.5 * (M + M.T)


def clamped_eigenvalues(M) -> np.ndarray:
    """Eigenvalues of a PSD matrix with values below EIGEN_FLOOR * ||M|| set to zero"""
    M = validate_information_matrix(M)
    eigenvalues = np.linalg.eigvalsh(M)
    norm = float(np.max(np.abs(eigenvalues)))
    if norm == 0.0:
        return np.zeros_like(eigenvalues)
    if eigenvalues[0] < -PSD_TOL * norm:
        raise InvalidMatrixError(
            f"Information matrix is indefinite (smallest eigenvalue {eigenvalues[0]:.3e}, norm {norm:.3e})"
        )
    eigenvalues[eigenvalues < EIGEN_FLOOR * norm] = 0.0
    return eigenvalues


def log_det(M) -> float:
    """log det M, or -inf when M is singular"""
    eigenvalues = clamped_eigenvalues(M)
    if np.any(eigenvalues <= 0.0):
        return -math.inf
    value = float(np.sum(np.log(eigenvalues)))
    if value <= math.log(DET_FLOOR):
        return -math.inf
    return value


def batch_log_det(stack) -> np.ndarray:
    """log_det for a stack of PSD matrices (K, m, m) with the same flooring rules"""
    stack = np.asarray(stack, dtype=float)
    if stack.shape[0] == 0:
        return np.zeros(0)
    eigenvalues = np.linalg.eigvalsh(0.5 * (stack + np.swapaxes(stack, 1, 2)))
    norm = np.max(np.abs(eigenvalues), axis=1)
    singular = (norm == 0.0) | np.any(eigenvalues < EIGEN_FLOOR * norm[:, None], axis=1)
    safe = np.where(singular[:, None], 1.0, eigenvalues)
    values = np.sum(np.log(safe), axis=1)
    values[singular | (values <= math.log(DET_FLOOR))] = -math.inf
    return values


def criterion_D(M) -> float:
    """Phi_D(M) = (det M)^(1/m); exactly 0 for singular M"""
    m = np.asarray(M).shape[0]
    value = log_det(M)
    if value == -math.inf:
        return 0.0
    return math.exp(value / m)


def phi_from_log_det(value: float, m: int) -> float:
    """Map a log-determinant to the Phi_D scale"""
    if value == -math.inf:
        return 0.0
    return math.exp(value / m)
