"""
Configuration management for the LAS design toolkit
Reads from environment variables with fallback defaults
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() in ('1', 'true', 'yes')


class Config:
    """Solver and reporting configuration"""

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    # Branch-and-bound defaults
    SOLVER_GAP = float(os.getenv('SOLVER_GAP', '1e-6'))
    SOLVER_INT_TOL = float(os.getenv('SOLVER_INT_TOL', '1e-6'))
    SOLVER_NODE_LIMIT = int(os.getenv('SOLVER_NODE_LIMIT', '0'))  # 0 = unlimited
    SOLVER_TIME_LIMIT = float(os.getenv('SOLVER_TIME_LIMIT', '0'))  # seconds, 0 = unlimited
    SOLVER_THREADS = int(os.getenv('SOLVER_THREADS', '1'))
    SOLVER_DETERMINISTIC = _env_bool('SOLVER_DETERMINISTIC', 'true')

    # Continuous relaxation
    RELAX_MAX_ITER = int(os.getenv('RELAX_MAX_ITER', '200'))
    RELAX_SEED = int(os.getenv('RELAX_SEED', '0'))
    LP_PRICING = os.getenv('LP_PRICING', 'dantzig')

    # Exhaustive oracle
    BRUTE_FORCE_CAP = int(os.getenv('BRUTE_FORCE_CAP', '10000000'))

    # Rank-one factorization route for the auxiliary problem
    DECOMPOSITION_ROUTE = os.getenv('DECOMPOSITION_ROUTE', 'eigen')

    # Reports and plots
    RESULTS_DIR = os.getenv('RESULTS_DIR', 'results')

    @classmethod
    def validate(cls):
        """Validate configuration"""
        errors = []

        if cls.SOLVER_GAP < 0:
            errors.append("SOLVER_GAP must be non-negative")

        if cls.SOLVER_INT_TOL <= 0 or cls.SOLVER_INT_TOL >= 0.5:
            errors.append("SOLVER_INT_TOL must be in (0, 0.5)")

        if cls.SOLVER_NODE_LIMIT < 0:
            errors.append("SOLVER_NODE_LIMIT must be at least 0 (0 = unlimited)")

        if cls.SOLVER_TIME_LIMIT < 0:
            errors.append("SOLVER_TIME_LIMIT must be at least 0 (0 = unlimited)")

        if cls.SOLVER_THREADS < 1:
            errors.append("SOLVER_THREADS must be at least 1")

        if cls.RELAX_MAX_ITER < 1:
            errors.append("RELAX_MAX_ITER must be at least 1")

        if cls.LP_PRICING not in ['bland', 'dantzig']:
            errors.append(f"Invalid LP_PRICING: {cls.LP_PRICING}")

        if cls.BRUTE_FORCE_CAP < 1:
            errors.append("BRUTE_FORCE_CAP must be at least 1")

        if cls.DECOMPOSITION_ROUTE not in ['eigen', 'cholesky']:
            errors.append(f"Invalid DECOMPOSITION_ROUTE: {cls.DECOMPOSITION_ROUTE}")

        if errors:
            raise ValueError(f"Configuration errors: {', '.join(errors)}")

        return True

# Validate configuration on import
Config.validate()
