"""Rank-one decomposition of elementary information matrices"""

from .factors import RankFactors, eigen_factors, factor_stack, factorize, pivoted_cholesky_factors

__all__ = ['RankFactors', 'eigen_factors', 'factor_stack', 'factorize', 'pivoted_cholesky_factors']
