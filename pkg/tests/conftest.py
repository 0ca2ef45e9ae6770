"""
Pytest configuration and fixtures for the LAS design toolkit tests
"""

import os
import sys
from pathlib import Path

import numpy as np
import pytest

# Repository root on the path so `from src...` imports resolve
ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

from src.core.constraints import LinearSparsityConstraint
from src.core.design import DesignSpace, ExactDesign
from src.core.problem import LASProblem
from src.models import PolynomialModel, RawMatrixModel

DATA_DIR = ROOT / "data"

# Reference designs as {dose: count}; point index = dose + 1 on the 0..100 grid
REFERENCE_DESIGNS = {
    'w0': {23: 27, 32: 8, 33: 22, 67: 10, 68: 10, 91: 23},
    'w1': {24: 23, 33: 7, 34: 30, 65: 5, 66: 16, 89: 19},
    'w2': {24: 26, 33: 38, 64: 20, 87: 16},
    'w3': {22: 1, 23: 2, 24: 24, 33: 39, 63: 19, 87: 15},
    'w4': {0: 1, 14: 1, 24: 25, 34: 39, 64: 18, 87: 16},
    'w5': {23: 25, 33: 25, 43: 10, 55: 11, 65: 15, 86: 14},
}

# Reference columns: phi, eff vs w0, expected failures, cost
REFERENCE_VALUES = {
    'w0': (60.11, 1.00, 49.35, 711.80),
    'w1': (58.75, 0.98, 39.99, 597.83),
    'w2': (57.94, 0.96, 39.76, 499.14),
    'w3': (57.46, 0.95, 39.75, 499.99),
    'w4': (56.75, 0.94, 39.47, 499.86),
    'w5': (53.45, 0.89, 36.94, 499.70),
}


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale solves, run with RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def reference_design(name: str) -> ExactDesign:
    return ExactDesign.from_pairs([(dose + 1, count) for dose, count in REFERENCE_DESIGNS[name].items()], 101)


def random_problem(rng: np.random.Generator, max_n: int = 6, max_N: int = 5, max_m: int = 3,
                   max_r: int = 2, max_rows: int = 3, min_n: int = 2) -> LASProblem:
    """Small random LAS problem with integer row coefficients and rank <= r matrices"""
    n = int(rng.integers(min_n, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    r = int(rng.integers(1, max_r + 1))
    N = int(rng.integers(0, max_N + 1))
    matrices = []
    for _ in range(n):
        F = rng.normal(size=(r, m))
        matrices.append(F.T @ F)
    model = RawMatrixModel(matrices, rank_bound=r)

    rows = []
    for k in range(int(rng.integers(0, max_rows + 1))):
        a = rng.integers(-1, 3, size=n).astype(float)
        c = rng.integers(-2, 3, size=n).astype(float)
        if not (a.any() or c.any()):
            c[0] = 1.0
        b = float(rng.integers(-1, N + 3))
        rows.append(LinearSparsityConstraint(a=a, c=c, b=b, name=f"random{k + 1}"))
    space = DesignSpace.from_values(np.arange(n, dtype=float))
    return LASProblem(space=space, model=model, constraints=tuple(rows), N=N, name="random")


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def line_problem():
    """X = {-1, 0, 1}, f(x) = (1, x), N = 2"""
    space = DesignSpace.from_values([-1.0, 0.0, 1.0])
    return LASProblem(space=space, model=PolynomialModel(1), N=2, name="line")


@pytest.fixture
def pair_problem():
    """X = {0, 1}, f(x) = (1, x), N = 2"""
    space = DesignSpace.from_values([0.0, 1.0])
    return LASProblem(space=space, model=PolynomialModel(1), N=2, name="pair")


@pytest.fixture(scope="session")
def cr_problems():
    """The bundled w0..w5 problems, loaded once"""
    from src.utils.problem_loader import load_problem
    return {f"w{i}": load_problem(DATA_DIR / "problems" / f"w{i}.json") for i in range(6)}


@pytest.fixture
def references():
    return {name: reference_design(name) for name in REFERENCE_DESIGNS}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_sparse():
    """Five-point quadratic problem with three LAS rows, N = 4"""
    from src.utils.problem_loader import load_problem
    return load_problem(DATA_DIR / "problems" / "toy_sparse.json")
