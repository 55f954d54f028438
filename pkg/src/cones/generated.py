"""
Finitely generated (polyhedral) cone.

Membership is a nonnegative least-squares feasibility problem, dual
membership is a sign check on the generators. There is no Euclidean
projection: the solver substitutes x = G lambda with lambda in an orthant.
"""

import logging
from typing import Any, Dict, Sequence

import numpy as np
from scipy.optimize import nnls

from src.core.types import (
    AbstractCone,
    ContractViolation,
    DEFAULT_TOL,
    SolverFailure,
    scaled_tol
)

logger = logging.getLogger(__name__)


def _nnls_residual(g: np.ndarray, x: np.ndarray) -> float:
    try:
        _, residual = nnls(g, x, maxiter=50 * g.shape[1] + 100)
    except RuntimeError as exc:
        raise SolverFailure(f"nonnegative least squares did not converge: {exc}") from exc
    return float(residual)


class GeneratedCone(AbstractCone):
    """
    The cone {G lambda : lambda >= 0} spanned by finitely many generators.

    Attributes:
        generators: Array of shape (ambient_dim, k), one generator per column
        full_dimensional: Whether the generators span the ambient space
    """

    variant = "generated"

    def __init__(
        self,
        generators: Sequence[Sequence[float]],
        check_pointed: bool = True,
        warn_degenerate: bool = True
    ):
        """
        Initialize the cone from its generators.

        Args:
            generators: List of generator vectors (all the same length)
            check_pointed: Verify that the cone contains no line
            warn_degenerate: Log a warning when the cone is not full-dimensional

        Raises:
            ContractViolation: Empty list, zero or non-finite generators, or a
                cone that is not pointed
        """
        g = np.asarray(generators, dtype=float)
        if g.ndim != 2 or g.shape[0] == 0:
            raise ContractViolation("a generated cone needs at least one generator vector")
        if not np.all(np.isfinite(g)):
            raise ContractViolation("generators contain NaN or Inf entries")
        norms = np.linalg.norm(g, axis=1)
        if np.any(norms <= 1e-14):
            raise ContractViolation("generators must be nonzero")
        self.generators = g.T.copy()
        self.generators.setflags(write=False)
        self.full_dimensional = bool(np.linalg.matrix_rank(self.generators) == self.ambient_dim)
        if check_pointed and not self._is_pointed():
            raise ContractViolation("generated cone is not pointed")
        if warn_degenerate and not self.full_dimensional:
            logger.warning(
                "generated cone spans a %d-dimensional subspace of R^%d",
                np.linalg.matrix_rank(self.generators), self.ambient_dim
            )

    @property
    def ambient_dim(self) -> int:
        return self.generators.shape[0]

    @property
    def n_generators(self) -> int:
        """Number of generators."""
        return self.generators.shape[1]

    def _is_pointed(self) -> bool:
        # Pointed iff 0 is not in the convex hull of the normalized generators
        g = self.generators / np.linalg.norm(self.generators, axis=0)
        lifted = np.vstack([g, np.ones((1, g.shape[1]))])
        target = np.zeros(lifted.shape[0])
        target[-1] = 1.0
        return _nnls_residual(lifted, target) > 1e-9

    def member(self, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        x = self.check_dim(x)
        return _nnls_residual(self.generators, x) <= scaled_tol(x, tol)

    def dual_member(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        e = self.check_dim(e)
        pairings = self.generators.T @ e / np.linalg.norm(self.generators, axis=0)
        return bool(np.min(pairings) >= -scaled_tol(e, tol))

    def violation(self, x: np.ndarray) -> float:
        return _nnls_residual(self.generators, self.check_dim(x))

    def dual_violation(self, e: np.ndarray) -> float:
        pairings = self.generators.T @ e / np.linalg.norm(self.generators, axis=0)
        return float(max(0.0, -np.min(pairings)))

    def interior_point(self) -> np.ndarray:
        g = self.generators / np.linalg.norm(self.generators, axis=0)
        p = g.sum(axis=1)
        return p / np.linalg.norm(p)

    def to_json(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "dim": self.ambient_dim,
            "generators": self.generators.T.tolist()
        }

    def __repr__(self) -> str:
        return f"GeneratedCone(dim={self.ambient_dim}, k={self.n_generators})"
