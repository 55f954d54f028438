"""
Core Type Definitions and Abstract Interfaces for resource-forge.

This module defines the contracts shared by every layer: the exception
hierarchy, the default tolerances and the abstract cone interface that the
concrete cones in ``src.cones`` implement and the conic solver consumes.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import numpy as np


# Membership tolerance, relative to max(1, ||x||_2)
DEFAULT_TOL = 1e-8

# Tolerance used when validating states, effects, measurements and channels
VALIDATION_TOL = 1e-9

# Looser tolerance for objects assembled from solver output
SOLVER_OBJECT_TOL = 1e-6


class ResourceForgeError(Exception):
    """Root of every error raised by resource-forge."""


class ContractViolation(ResourceForgeError, ValueError):
    """A precondition of an operation does not hold."""


class ModelError(ContractViolation):
    """
    Malformed model, free-set or object description.

    Attributes:
        source: File name or other origin of the description
        line: 1-based line of the offending token, when known
        column: 1-based column of the offending token, when known
    """

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None
    ):
        location = ""
        if source is not None:
            location = source
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(location + message)
        self.source = source
        self.line = line
        self.column = column


class UnsupportedOperation(ResourceForgeError, NotImplementedError):
    """The operation is not defined for the given representation."""


class SolverFailure(ResourceForgeError, RuntimeError):
    """
    The conic solver broke down or did not reach the requested accuracy.

    Attributes:
        log: Last iteration rows (iteration, primal_res, dual_res, gap)
        solution: The last Solution produced, if any
    """

    def __init__(
        self,
        message: str,
        log: Optional[List[Tuple[int, float, float, float]]] = None,
        solution: Any = None
    ):
        if log:
            tail = log[-5:]
            rows = "; ".join(
                f"it={it} pres={p:.3e} dres={d:.3e} gap={g:.3e}" for it, p, d, g in tail
            )
            message = f"{message} [last iterations: {rows}]"
        super().__init__(message)
        self.log = list(log) if log else []
        self.solution = solution


class InternalError(ResourceForgeError, RuntimeError):
    """A computed result contradicts a proven property of the problem."""


def as_vector(x: Any, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    """
    Convert input to a finite float vector, optionally checking its length.

    Args:
        x: Array-like input
        dim: Expected length, or None to accept any
        name: Name used in error messages

    Returns:
        One-dimensional float64 array

    Raises:
        ContractViolation: On wrong shape, wrong length or non-finite entries
    """
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ContractViolation(f"{name} is not a real vector: {exc}") from exc
    if arr.ndim != 1:
        raise ContractViolation(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ContractViolation(f"{name} has dimension {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains NaN or Inf entries")
    return arr


def scaled_tol(x: np.ndarray, tol: float) -> float:
    """Absolute threshold for a relative tolerance on x."""
    return tol * max(1.0, float(np.linalg.norm(x)))


class AbstractCone(ABC):
    """
    Abstract interface for closed convex cones in a real coordinate space.

    Concrete cones are immutable. Membership tests are relative to
    max(1, ||x||_2); projection is only available for cones with a cheap
    Euclidean projection.
    """

    variant: str = "abstract"

    @property
    @abstractmethod
    def ambient_dim(self) -> int:
        """Dimension of the coordinate space the cone lives in."""
        pass

    @abstractmethod
    def member(self, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        """
        Test whether x lies in the cone.

        Args:
            x: Coordinate vector of length ambient_dim
            tol: Relative tolerance

        Returns:
            True if x is within tol of the cone
        """
        pass

    @abstractmethod
    def dual_member(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        """
        Test whether e lies in the dual cone.

        Args:
            e: Functional coordinates of length ambient_dim
            tol: Relative tolerance

        Returns:
            True if <e, x> >= -tol for every x in the cone
        """
        pass

    @abstractmethod
    def violation(self, x: np.ndarray) -> float:
        """
        Magnitude by which x fails to be in the cone (0 when inside).

        Args:
            x: Coordinate vector

        Returns:
            Non-negative violation measure
        """
        pass

    @abstractmethod
    def interior_point(self) -> np.ndarray:
        """
        Return a reference point in the (relative) interior of the cone.

        Returns:
            Coordinate vector with unit 2-norm
        """
        pass

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        """Serialize to the cone JSON form."""
        pass

    @property
    def is_self_dual(self) -> bool:
        """True for cones equal to their dual in these coordinates."""
        return False

    def project(self, x: np.ndarray) -> np.ndarray:
        """
        Euclidean projection onto the cone.

        Args:
            x: Coordinate vector

        Returns:
            The nearest point of the cone

        Raises:
            UnsupportedOperation: When the cone has no direct projection
        """
        raise UnsupportedOperation(f"projection onto a {self.variant} cone is not supported")

    def dual_violation(self, e: np.ndarray) -> float:
        """Magnitude by which e fails to be in the dual cone."""
        if self.is_self_dual:
            return self.violation(e)
        raise UnsupportedOperation(f"dual violation for {self.variant} cone")

    def check_dim(self, x: Any, name: str = "vector") -> np.ndarray:
        """Convert x to a vector of the cone's ambient dimension."""
        return as_vector(x, self.ambient_dim, name)
