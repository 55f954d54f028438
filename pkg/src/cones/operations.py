"""
Functional entry points for cone services and the cone JSON codec.
"""

from typing import Any, Dict

import numpy as np

from src.core.types import AbstractCone, DEFAULT_TOL, ModelError
from .orthant import OrthantCone
from .psd import PsdCone
from .generated import GeneratedCone


def member(cone: AbstractCone, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """
    Test cone membership.

    Args:
        cone: The cone
        x: Coordinates of length cone.ambient_dim
        tol: Positive relative tolerance

    Returns:
        True if x is within tol of the cone

    Raises:
        ContractViolation: On dimension mismatch
        SolverFailure: If the generated-cone feasibility problem fails
    """
    return cone.member(x, tol)


def dual_member(cone: AbstractCone, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """
    Test membership in the dual cone.

    Args:
        cone: The cone
        e: Functional coordinates of length cone.ambient_dim
        tol: Positive relative tolerance

    Returns:
        True if e is within tol of the dual cone
    """
    return cone.dual_member(e, tol)


def project(cone: AbstractCone, x: np.ndarray) -> np.ndarray:
    """
    Euclidean projection onto an orthant or PSD cone.

    Raises:
        UnsupportedOperation: For generated cones
    """
    return cone.project(x)


def cone_to_json(cone: AbstractCone) -> Dict[str, Any]:
    """Serialize a cone to {"variant", "dim"[, "generators"]}."""
    return cone.to_json()


def cone_from_json(data: Dict[str, Any]) -> AbstractCone:
    """
    Build a cone from its JSON form.

    Args:
        data: Mapping with keys "variant", "dim" and, for generated cones,
            "generators"

    Returns:
        The cone

    Raises:
        ModelError: Unknown variant or missing/invalid fields
    """
    if not isinstance(data, dict):
        raise ModelError("cone description must be an object")
    variant = data.get("variant")
    try:
        if variant == "orthant":
            return OrthantCone(int(data["dim"]))
        if variant == "psd":
            return PsdCone(int(data["dim"]))
        if variant == "generated":
            cone = GeneratedCone(data["generators"])
            if "dim" in data and int(data["dim"]) != cone.ambient_dim:
                raise ModelError(
                    f"generated cone declares dim {data['dim']} but generators have "
                    f"length {cone.ambient_dim}"
                )
            return cone
    except KeyError as exc:
        raise ModelError(f"cone description is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"invalid cone description: {exc}") from exc
    raise ModelError(f"unknown cone variant {variant!r}")
