"""
Positive semidefinite cone in Hermitian coordinates.

Psd(d) lives in the d^2 real coordinates of ``src.cones.hermitian``, so it
covers both the real symmetric and the complex Hermitian case and is
self-dual under the plain dot product.
"""

from typing import Any, Dict

import numpy as np
from scipy.linalg import eigh, eigvalsh

from src.core.types import AbstractCone, ContractViolation, DEFAULT_TOL, scaled_tol
from .hermitian import herm_to_vec, vec_to_herm


class PsdCone(AbstractCone):
    """
    The cone of d x d positive semidefinite Hermitian matrices.

    Attributes:
        d: Matrix size; the ambient dimension is d^2
    """

    variant = "psd"

    def __init__(self, d: int):
        """
        Initialize the cone.

        Args:
            d: Matrix size (positive)
        """
        if int(d) < 1:
            raise ContractViolation(f"psd matrix size must be positive, got {d}")
        self.d = int(d)

    @property
    def ambient_dim(self) -> int:
        return self.d * self.d

    @property
    def is_self_dual(self) -> bool:
        return True

    def min_eigenvalue(self, x: np.ndarray) -> float:
        """Smallest eigenvalue of the matrix with coordinates x."""
        return float(eigvalsh(vec_to_herm(self.check_dim(x)))[0])

    def member(self, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        x = self.check_dim(x)
        return self.min_eigenvalue(x) >= -scaled_tol(x, tol)

    def dual_member(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        return self.member(e, tol)

    def violation(self, x: np.ndarray) -> float:
        return max(0.0, -self.min_eigenvalue(x))

    def project(self, x: np.ndarray) -> np.ndarray:
        """Clamp the negative eigenvalues of the matrix with coordinates x."""
        h = vec_to_herm(self.check_dim(x))
        w, v = eigh(h)
        if w[0] >= 0.0:
            return np.array(x, dtype=float)
        w = np.maximum(w, 0.0)
        return herm_to_vec((v * w) @ v.conj().T)

    def interior_point(self) -> np.ndarray:
        return herm_to_vec(np.eye(self.d)) / np.sqrt(self.d)

    def to_json(self) -> Dict[str, Any]:
        return {"variant": self.variant, "dim": self.d}

    def __repr__(self) -> str:
        return f"PsdCone({self.d})"
