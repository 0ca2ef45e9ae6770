"""
Exception hierarchy for design problems, compilation and solving
"""

from typing import Optional


class DesignError(ValueError):
    """Base class for every error raised by the toolkit"""


class DimensionMismatchError(DesignError):
    """A design, coefficient list or matrix does not match the design space"""


class InvalidMatrixError(DesignError):
    """Matrix is not symmetric or not positive semidefinite"""


class SingularDesignError(DesignError):
    """Reference design has a singular information matrix"""


class ConstraintSpecError(DesignError):
    """Constraint builder arguments are inconsistent"""


class RankBoundError(DesignError):
    """Elementary information matrix exceeds the declared rank bound"""


class InfeasibleDesignError(DesignError):
    """Design violates the constraints a mapping requires"""


class ProblemFileError(DesignError):
    """Problem, scenario or design file could not be parsed"""

    def __init__(self, path: str, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, field: Optional[str] = None):
        self.path = str(path)
        self.line = line
        self.column = column
        self.field = field
        location = self.path
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        if field:
            location += f" [{field}]"
        super().__init__(f"{location}: {message}")


class BruteForceLimitError(DesignError):
    """Enumeration would exceed the configured cap"""

    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            f"Brute force refused: about {estimate:,} candidate designs exceeds cap {cap:,}"
        )


class LPNumericalError(DesignError):
    """Simplex basis became numerically unusable"""

    def __init__(self, message: str, condition: float):
        self.condition = condition
        super().__init__(f"{message} (basis condition number {condition:.3e})")
