"""
Product cone used as the variable layout of a conic program.

Layout: a block of free (unconstrained) coordinates first, then the factors
in order. The dual of the free block is {0}.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.types import AbstractCone, ContractViolation, DEFAULT_TOL, as_vector


class ProductCone:
    """
    R^free_dim x K_1 x ... x K_p.

    Attributes:
        free_dim: Number of leading unconstrained coordinates
        factors: Ordered cone factors
        names: Optional label per factor (used in certificates)
        offsets: Start coordinate of every factor
    """

    def __init__(
        self,
        free_dim: int,
        factors: Sequence[AbstractCone],
        names: Optional[Sequence[str]] = None
    ):
        if free_dim < 0:
            raise ContractViolation("free dimension must be nonnegative")
        self.free_dim = int(free_dim)
        self.factors: List[AbstractCone] = list(factors)
        if names is None:
            names = [f"{f.variant}[{i}]" for i, f in enumerate(self.factors)]
        if len(names) != len(self.factors):
            raise ContractViolation("one name per cone factor is required")
        self.names: List[str] = list(names)
        self.offsets: List[int] = []
        pos = self.free_dim
        for f in self.factors:
            self.offsets.append(pos)
            pos += f.ambient_dim
        self._dim = pos

    @property
    def ambient_dim(self) -> int:
        return self._dim

    def blocks(self) -> List[Tuple[int, int, AbstractCone]]:
        """List of (start, stop, factor) triples."""
        return [(o, o + f.ambient_dim, f) for o, f in zip(self.offsets, self.factors)]

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
        """
        Split a vector into its free block and factor blocks.

        Args:
            x: Vector of length ambient_dim

        Returns:
            Tuple (free_part, [factor parts])
        """
        x = as_vector(x, self.ambient_dim)
        return x[:self.free_dim], [x[a:b] for a, b, _ in self.blocks()]

    def member(self, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        _, parts = self.split(x)
        return all(f.member(p, tol) for f, p in zip(self.factors, parts))

    def dual_member(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        free, parts = self.split(e)
        if free.size and np.max(np.abs(free)) > tol * max(1.0, float(np.linalg.norm(e))):
            return False
        return all(f.dual_member(p, tol) for f, p in zip(self.factors, parts))

    def project(self, x: np.ndarray) -> np.ndarray:
        """Project every factor block, leaving the free block untouched."""
        x = as_vector(x, self.ambient_dim).copy()
        for a, b, f in self.blocks():
            x[a:b] = f.project(x[a:b])
        return x

    def __repr__(self) -> str:
        return f"ProductCone(free={self.free_dim}, factors={self.factors!r})"
