"""
Single-shot min-entropies, in bits.
"""

import math
from typing import Sequence

import numpy as np

from src.core.types import ContractViolation

NORMALIZATION_TOL = 1e-12


def _distribution(values, name: str) -> np.ndarray:
    p = np.asarray(values, dtype=float)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise ContractViolation(f"{name} must be a finite, nonempty array")
    if np.min(p) < -NORMALIZATION_TOL:
        raise ContractViolation(f"{name} has negative entries")
    total = float(np.sum(p))
    if total <= NORMALIZATION_TOL:
        raise ContractViolation(f"{name} is the zero distribution")
    if abs(total - 1.0) > NORMALIZATION_TOL * max(1, p.size):
        raise ContractViolation(f"{name} sums to {total!r}, expected 1")
    return np.maximum(p, 0.0)


class JointDistribution:
    """
    A joint distribution p(x, y), rows indexed by x.

    Attributes:
        matrix: Nonnegative array summing to 1
    """

    def __init__(self, matrix: Sequence[Sequence[float]]):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2:
            raise ContractViolation("a joint distribution is a matrix p(x, y)")
        self.matrix = _distribution(m, "joint distribution")

    @classmethod
    def from_ensemble(cls, probs: Sequence[float], states: Sequence[np.ndarray], effects: Sequence[np.ndarray]):
        """p(x, y) = p_x <N_y, s_x>, clipped at 0 and renormalized against rounding."""
        m = np.array([[p * float(e @ s) for e in effects] for p, s in zip(probs, states)])
        m = np.maximum(m, 0.0)
        return cls(m / np.sum(m))

    @property
    def marginal_x(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    @property
    def marginal_y(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def __repr__(self) -> str:
        return f"JointDistribution({self.matrix.shape[0]}x{self.matrix.shape[1]})"


def h_min(probs: Sequence[float]) -> float:
    """H_min(X) = -log2 max_x p_x."""
    return -math.log2(float(np.max(_distribution(probs, "distribution"))))


def h_min_conditional(joint: JointDistribution) -> float:
    """H_min(X|Y) = -log2 sum_y max_x p(x, y)."""
    return -math.log2(float(np.sum(np.max(joint.matrix, axis=0))))


def i_min(joint: JointDistribution) -> float:
    """I_min(X:Y) = H_min(X) - H_min(X|Y)."""
    return h_min(joint.marginal_x) - h_min_conditional(joint)
