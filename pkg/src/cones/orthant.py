"""
Nonnegative orthant cone.

State cone of classical probability theory; self-dual in the standard
coordinates.
"""

from typing import Any, Dict

import numpy as np

from src.core.types import AbstractCone, ContractViolation, DEFAULT_TOL, scaled_tol


class OrthantCone(AbstractCone):
    """
    The cone {x in R^d : x_i >= 0}.

    Attributes:
        dim: Number of coordinates
    """

    variant = "orthant"

    def __init__(self, dim: int):
        """
        Initialize the orthant.

        Args:
            dim: Number of coordinates (positive)
        """
        if int(dim) < 1:
            raise ContractViolation(f"orthant dimension must be positive, got {dim}")
        self.dim = int(dim)

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def is_self_dual(self) -> bool:
        return True

    def member(self, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        x = self.check_dim(x)
        return bool(np.min(x) >= -scaled_tol(x, tol))

    def dual_member(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        return self.member(e, tol)

    def violation(self, x: np.ndarray) -> float:
        return float(max(0.0, -np.min(x)))

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.maximum(self.check_dim(x), 0.0)

    def interior_point(self) -> np.ndarray:
        return np.ones(self.dim) / np.sqrt(self.dim)

    def to_json(self) -> Dict[str, Any]:
        return {"variant": self.variant, "dim": self.dim}

    def __repr__(self) -> str:
        return f"OrthantCone({self.dim})"
