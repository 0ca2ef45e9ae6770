"""
Unit tests for the design data model and the LAS constraint builders
"""

import logging

import numpy as np
import pytest

from src.core import constraints as builders
from src.core.constraints import LinearSparsityConstraint, Sense, normalized_rows
from src.core.design import DesignSpace, ExactDesign
from src.core.exceptions import ConstraintSpecError, DesignError, DimensionMismatchError
from src.solver.brute_force import compositions


def accepts(rows, counts) -> bool:
    """Independent per-row evaluation"""
    counts = np.asarray(counts, dtype=float)
    support = (counts > 0).astype(float)
    for row in rows:
        lhs = float(np.dot(row.a, counts) + np.dot(row.c, support))
        if row.sense is Sense.EQ:
            if abs(lhs - row.b) > 1e-9:
                return False
        elif lhs - row.b > 1e-9:
            return False
    return True


def all_designs(n, N):
    return np.vstack(list(compositions(N, n)))


class TestDesignSpace:
    """Ordered candidate points"""

    def test_grid_labels(self):
        space = DesignSpace.grid(0, 100, 101)
        assert space.n == 101
        assert space.points[23].label == "23"
        assert space.index_of("23") == 24

    def test_duplicate_labels_rejected(self):
        with pytest.raises(DesignError):
            DesignSpace.from_values([1.0, 2.0], labels=["a", "a"])

    def test_label_count_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            DesignSpace.from_values([1.0, 2.0], labels=["a"])


class TestExactDesign:
    """Integer replication counts"""

    def test_support(self):
        design = ExactDesign(counts=(0, 3, 0, 1))
        assert design.total == 4
        assert design.support_size == 2
        assert design.to_pairs() == [(2, 3), (4, 1)]
        assert list(design.support) == [0.0, 1.0, 0.0, 1.0]

    def test_negative_rejected(self):
        with pytest.raises(DesignError):
            ExactDesign(counts=(1, -1))

    def test_fractional_rejected(self):
        with pytest.raises(DesignError):
            ExactDesign(counts=(1.5, 0))

    def test_from_pairs_accumulates(self):
        assert ExactDesign.from_pairs([(1, 2), (1, 1), (3, 4)], 3).counts == (3, 0, 4)

    def test_from_pairs_out_of_range(self):
        with pytest.raises(DimensionMismatchError):
            ExactDesign.from_pairs([(4, 1)], 3)


class TestConstraintRows:
    """Row validation and normalization"""

    def test_all_zero_rejected(self):
        with pytest.raises(ConstraintSpecError):
            LinearSparsityConstraint(a=(0, 0), c=(0, 0), b=1)

    def test_equality_normalized_to_two_rows(self):
        row = LinearSparsityConstraint(a=(1, -1), c=(0, 0), b=0, sense="=")
        A, C, b, source = normalized_rows([row], 2)
        assert A.shape == (2, 2)
        assert list(source) == [0, 0]
        np.testing.assert_array_equal(A[1], [-1.0, 1.0])

    def test_length_mismatch(self):
        row = LinearSparsityConstraint(a=(1, 0, 0), c=(0, 0, 0), b=1)
        with pytest.raises(DimensionMismatchError):
            normalized_rows([row], 2)


class TestBuilders:
    """Coefficient patterns of the named builders"""

    def test_max_support_pattern(self):
        space = DesignSpace.from_values([1.0, 2.0, 3.0])
        (row,) = builders.max_support_size(space, 6)
        assert row.a == (0.0, 0.0, 0.0)
        assert row.c == (1.0, 1.0, 1.0)
        assert row.b == 6.0

    def test_min_support_negated(self):
        space = DesignSpace.from_values([1.0, 2.0, 3.0])
        (row,) = builders.min_support_size(space, 2)
        assert row.c == (-1.0, -1.0, -1.0)
        assert row.b == -2.0

    def test_separation_row_count(self):
        space = DesignSpace.grid(0, 100, 101)
        assert len(builders.separation_windows(space, 10)) == 92

    def test_support_replication_row_count(self):
        space = DesignSpace.grid(0, 100, 101)
        assert len(builders.support_replication_bounds(space, 10, 25, n_trials=100)) == 202

    def test_inconsistent_bounds(self):
        space = DesignSpace.from_values([1.0, 2.0])
        with pytest.raises(ConstraintSpecError):
            builders.support_replication_bounds(space, 5, 3)
        with pytest.raises(ConstraintSpecError):
            builders.max_support_size(space, 4, n_trials=3)
        with pytest.raises(ConstraintSpecError):
            builders.separation_windows(space, 3)

    def test_sign_checks(self):
        space = DesignSpace.from_values([1.0, 2.0])
        with pytest.raises(ConstraintSpecError):
            builders.exclusion(space, [1.0, -1.0], 3)
        with pytest.raises(ConstraintSpecError):
            builders.inclusion(space, [-1.0, 0.0], 1)
        with pytest.raises(ConstraintSpecError):
            builders.mixed(space, [1.0, 1.0], 1)

    def test_balance_overlap(self):
        space = DesignSpace.from_values([1.0, 2.0, 3.0])
        with pytest.raises(ConstraintSpecError):
            builders.balance(space, [1, 2], [2, 3])


class TestBuilderSemantics:
    """Each builder accepts exactly the designs its definition describes"""

    @pytest.mark.parametrize("n,N", [(3, 4), (4, 5), (5, 3)])
    def test_max_support(self, n, N):
        space = DesignSpace.from_values(np.arange(n, dtype=float))
        rows = builders.max_support_size(space, 2)
        for counts in all_designs(n, N):
            assert accepts(rows, counts) == (np.count_nonzero(counts) <= 2)

    @pytest.mark.parametrize("n,N", [(4, 4), (5, 5)])
    def test_min_support(self, n, N):
        space = DesignSpace.from_values(np.arange(n, dtype=float))
        rows = builders.min_support_size(space, 3)
        for counts in all_designs(n, N):
            assert accepts(rows, counts) == (np.count_nonzero(counts) >= 3)

    @pytest.mark.parametrize("n,N,delta", [(4, 3, 2), (5, 4, 3), (5, 5, 2)])
    def test_separation(self, n, N, delta):
        space = DesignSpace.from_values(np.arange(n, dtype=float))
        rows = builders.separation_windows(space, delta)
        for counts in all_designs(n, N):
            support = np.nonzero(counts)[0]
            spread = bool(np.all(np.diff(support) >= delta))
            assert accepts(rows, counts) == spread

    @pytest.mark.parametrize("n,N", [(3, 5), (4, 5)])
    def test_support_replication(self, n, N):
        space = DesignSpace.from_values(np.arange(n, dtype=float))
        rows = builders.support_replication_bounds(space, 2, 3, n_trials=N)
        for counts in all_designs(n, N):
            ok = all(c == 0 or 2 <= c <= 3 for c in counts)
            assert accepts(rows, counts) == ok

    def test_replication_limits_force_points(self):
        space = DesignSpace.from_values(np.arange(3, dtype=float))
        rows = builders.replication_limits(space, [1, 0, 0], [3, 3, 3], n_trials=4)
        for counts in all_designs(3, 4):
            ok = counts[0] >= 1 and all(c <= 3 for c in counts)
            assert accepts(rows, counts) == ok

    def test_budget(self):
        space = DesignSpace.from_values(np.arange(3, dtype=float))
        rows = builders.budget(space, [1.0, 2.0, 3.0], [5.0, 0.0, 1.0], 12.0)
        for counts in all_designs(3, 4):
            cost = np.dot([1.0, 2.0, 3.0], counts) + np.dot([5.0, 0.0, 1.0], counts > 0)
            assert accepts(rows, counts) == (cost <= 12.0)

    def test_privacy_and_direct_limit(self):
        space = DesignSpace.from_values(np.arange(4, dtype=float))
        rows = builders.privacy(space, [1, 2], 2) + builders.direct_limit(space, 4, 1)
        for counts in all_designs(4, 4):
            ok = counts[0] + counts[1] <= 2 and counts[3] <= 1
            assert accepts(rows, counts) == ok

    def test_balance(self):
        space = DesignSpace.from_values(np.arange(4, dtype=float))
        rows = builders.balance(space, [1], [3, 4])
        for counts in all_designs(4, 4):
            assert accepts(rows, counts) == (counts[0] == counts[2] + counts[3])


class TestBuilderLogging:
    """Builders report how many rows they produced"""

    def test_window_rows_logged(self, caplog):
        space = DesignSpace.from_values(np.arange(5.0))
        with caplog.at_level(logging.DEBUG, logger="src.core.constraints"):
            builders.separation_windows(space, 2)
        assert "separation: 4 windows of 2 points" in caplog.text

    def test_replication_rows_logged(self, caplog):
        space = DesignSpace.from_values(np.arange(3.0))
        with caplog.at_level(logging.DEBUG, logger="src.core.constraints"):
            builders.support_replication_bounds(space, 1, 2)
        assert "support_replication: 6 rows" in caplog.text
