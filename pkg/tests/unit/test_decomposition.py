"""
Unit tests for rank-one factorizations of elementary information matrices
"""

import numpy as np
import pytest

from src.core.exceptions import DesignError, InvalidMatrixError, RankBoundError
from src.decomposition import eigen_factors, factor_stack, factorize, pivoted_cholesky_factors
from src.models.continuation_ratio import THETA_0, cr_elementary_info


class TestEigenRoute:
    """sqrt(lambda) u factors"""

    def test_diagonal(self):
        factors = eigen_factors(np.diag([4.0, 1.0, 0.0]), 2)
        np.testing.assert_allclose(factors.vectors, [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]], atol=1e-12)
        assert factors.rank == 2

    def test_padding_when_rank_below_bound(self):
        f = np.array([1.0, 2.0])
        factors = eigen_factors(np.outer(f, f), 2)
        assert factors.vectors.shape == (2, 2)
        np.testing.assert_array_equal(factors.vectors[1], 0.0)
        np.testing.assert_allclose(factors.reconstruct(), np.outer(f, f), atol=1e-12)

    def test_zero_matrix(self):
        assert eigen_factors(np.zeros((3, 3)), 1).rank == 0

    def test_rank_bound_exceeded(self):
        with pytest.raises(RankBoundError):
            eigen_factors(np.eye(3), 2)

    def test_indefinite(self):
        with pytest.raises(InvalidMatrixError):
            eigen_factors(np.diag([1.0, -1.0]), 2)

    def test_sign_convention(self):
        f = np.array([-1.0, 3.0])
        (vector,) = eigen_factors(np.outer(f, f), 1).vectors
        assert vector[0] > 0


class TestCholeskyRoute:
    """Greedy pivoted Cholesky"""

    def test_reconstruction(self, rng):
        F = rng.normal(size=(2, 5))
        H = F.T @ F
        factors = pivoted_cholesky_factors(H, 2)
        np.testing.assert_allclose(factors.reconstruct(), H, atol=1e-10 * (1 + np.max(np.abs(H))))

    def test_first_pivot_is_largest_diagonal(self):
        H = np.diag([1.0, 9.0])
        factors = pivoted_cholesky_factors(H, 2)
        np.testing.assert_allclose(factors.vectors[0], [0.0, 3.0])

    def test_rank_bound_exceeded(self):
        with pytest.raises(RankBoundError):
            pivoted_cholesky_factors(np.eye(3), 1)


class TestDispatch:
    """Route selection and stacking"""

    def test_unknown_route(self):
        with pytest.raises(DesignError):
            factorize(np.eye(2), 2, route='qr')

    def test_stack_shape_and_error_prefix(self):
        stack = np.array([np.eye(2), np.diag([1.0, 0.0])])
        assert factor_stack(stack, 2).shape == (2, 2, 2)
        with pytest.raises(RankBoundError, match="Point 1"):
            factor_stack(stack, 1)

    @pytest.mark.parametrize("route", ['eigen', 'cholesky'])
    def test_cr_matrices(self, route):
        for x in [0.0, 23.0, 50.0, 79.0]:
            H = cr_elementary_info(x, THETA_0)
            factors = factorize(H, 2, route)
            np.testing.assert_allclose(factors.reconstruct(), H, atol=1e-10 * (1 + np.max(np.abs(H))))
