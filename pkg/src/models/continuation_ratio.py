"""
Continuation-ratio dose-response model

Trinomial outcome at dose x: no reaction (p0), success without toxicity (pS),
toxicity (pT), with
    logit pT        = a1 + b1 x
    log(pS / p0)    = a2 + b2 x
All exponentials go through log(1 + e^z) = logaddexp(0, z), so any |a + bx| is safe.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from src.core.constraints import LinearSparsityConstraint, budget, exclusion
from src.core.design import DesignSpace
from src.core.exceptions import DesignError
from src.models.base import InformationModel, ModelType

logger = logging.getLogger(__name__)

# Cost model of the dose-finding example
DOSE_PREPARATION_RATE = 0.4   # one-off cost 0.4 x per distinct prepared dose x
UNDERDOSE_COST = 5.0          # patient with no reaction
OVERDOSE_COST = 20.0          # patient with toxicity


@dataclass(frozen=True)
class CRParameters:
    """theta = (a1, a2, b1, b2) with positive slopes"""
    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        if not self.b1 > 0 or not self.b2 > 0:
            raise DesignError(f"Continuation-ratio slopes must be positive, got b1={self.b1}, b2={self.b2}")

    @property
    def toxicity_midpoint(self) -> float:
        """Dose with pT = 0.5"""
        return -self.a1 / self.b1

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.a1, self.a2, self.b1, self.b2)


# Nominal parameter of the dose-finding example
THETA_0 = CRParameters(a1=-9.5, a2=-9.1, b1=0.12, b2=0.33)


def _softplus(z):
    return np.logaddexp(0.0, z)


def cr_probabilities(x, theta: CRParameters):
    """(p0, pS, pT) at dose x (scalar or array)"""
    x = np.asarray(x, dtype=float)
    z1 = theta.a1 + theta.b1 * x
    z2 = theta.a2 + theta.b2 * x
    l1, l2 = _softplus(z1), _softplus(z2)
    p0 = np.exp(-l1 - l2)
    p_s = np.exp(z2 - l1 - l2)
    p_t = np.exp(z1 - l1)
    if p0.ndim == 0:
        return float(p0), float(p_s), float(p_t)
    return p0, p_s, p_t


def cr_weights(x, theta: CRParameters):
    """
    Weights (u1, u2) of the two rank-one terms of H(x):
    u1 = e^z2 / ((1 + e^z2)^2 (1 + e^z1)),  u2 = e^z1 / (1 + e^z1)^2
    """
    x = np.asarray(x, dtype=float)
    z1 = theta.a1 + theta.b1 * x
    z2 = theta.a2 + theta.b2 * x
    l1, l2 = _softplus(z1), _softplus(z2)
    u1 = np.exp(z2 - 2.0 * l2 - l1)
    u2 = np.exp(z1 - 2.0 * l1)
    if u1.ndim == 0:
        return float(u1), float(u2)
    return u1, u2


def cr_elementary_info(x: float, theta: CRParameters) -> np.ndarray:
    """H(x) = u1 f1 f1^T + u2 f2 f2^T with f1 = (1, x, 0, 0), f2 = (0, 0, 1, x)"""
    x = float(x)
    u1, u2 = cr_weights(x, theta)
    block = np.array([[1.0, x], [x, x * x]])
    H = np.zeros((4, 4))
    H[:2, :2] = u1 * block
    H[2:, 2:] = u2 * block
    return H


def cr_failure_prob(x, theta: CRParameters):
    """Probability that a trial fails (no reaction or toxicity): p0 + pT"""
    p0, _, p_t = cr_probabilities(x, theta)
    return p0 + p_t


def cr_cost_coefficients(space: DesignSpace, theta: CRParameters = THETA_0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cost coefficients (gamma, gamma') for the dose-finding example.

    gamma(x)  = 5 p0(x) + 20 pT(x)  charged per patient (misdosing)
    gamma'(x) = 0.4 x               charged once per prepared dose
    """
    doses = space.values
    p0, _, p_t = cr_probabilities(doses, theta)
    per_patient = UNDERDOSE_COST * np.asarray(p0) + OVERDOSE_COST * np.asarray(p_t)
    overhead = DOSE_PREPARATION_RATE * doses
    return per_patient, overhead


def expected_failures(counts, space: DesignSpace, theta: CRParameters = THETA_0) -> float:
    """E(number of failed trials) of a design"""
    counts = np.asarray(counts, dtype=float)
    return float(np.dot(counts, cr_failure_prob(space.values, theta)))


def design_cost(counts, space: DesignSpace, theta: CRParameters = THETA_0) -> float:
    """Total cost: misdosing per patient plus preparation per distinct dose"""
    counts = np.asarray(counts, dtype=float)
    per_patient, overhead = cr_cost_coefficients(space, theta)
    return float(np.dot(per_patient, counts) + np.dot(overhead, counts > 0))


class CRModel(InformationModel):
    """Continuation-ratio model localized at theta0 (m = 4, rank 2)"""

    model_type = ModelType.CONTINUATION_RATIO

    def __init__(self, theta0: CRParameters = THETA_0):
        super().__init__(m=4, rank_bound=2)
        self.theta0 = theta0

    def elementary_info(self, coordinates) -> np.ndarray:
        return cr_elementary_info(np.atleast_1d(coordinates)[0], self.theta0)

    def to_dict(self) -> Dict[str, Any]:
        return {"type": self.model_type.value, "a1": self.theta0.a1, "a2": self.theta0.a2,
                "b1": self.theta0.b1, "b2": self.theta0.b2}


# ---------------------------------------------------------------------------
# model-dependent constraint builders (coefficients localized at theta0)
# ---------------------------------------------------------------------------

def failure_limit(space: DesignSpace, model: CRModel, limit: float,
                  name: str = "expected_failures") -> List[LinearSparsityConstraint]:
    """Expected number of failed trials at most `limit`"""
    _require_cr(model, name)
    p_f = cr_failure_prob(space.values, model.theta0)
    logger.debug(f"{name}: failure probabilities in [{p_f.min():.4f}, {p_f.max():.4f}], limit {limit:g}")
    return exclusion(space, p_f, limit, name=name)


def cr_budget(space: DesignSpace, model: CRModel, limit: float,
              name: str = "cost") -> List[LinearSparsityConstraint]:
    """Total cost (misdosing + dose preparation) at most `limit`"""
    _require_cr(model, name)
    per_patient, overhead = cr_cost_coefficients(space, model.theta0)
    logger.debug(f"{name}: per-trial cost up to {per_patient.max():.4f}, budget {limit:g}")
    return budget(space, per_patient, overhead, limit, name=name)


def _require_cr(model, name: str):
    if not isinstance(model, CRModel):
        raise DesignError(f"{name} needs a continuation-ratio model, got {model!r}")
