"""Information models for exact design problems"""

from .base import InformationModel, ModelType
from .continuation_ratio import CRModel, CRParameters, THETA_0
from .polynomial import PolynomialModel
from .raw_matrix import RawMatrixModel

__all__ = ['InformationModel', 'ModelType', 'CRModel', 'CRParameters', 'THETA_0',
           'PolynomialModel', 'RawMatrixModel']
