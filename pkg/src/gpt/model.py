"""
GPT model: a real vector space with a state cone and a unit effect.

States are the normalized cone elements, effects the functionals between 0
and the unit effect in the dual order. Functionals share the coordinates of
the vectors they act on and pair by the plain dot product.
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.linalg import eigh, LinAlgError

from src.core.types import (
    AbstractCone,
    ContractViolation,
    DEFAULT_TOL,
    ModelError,
    UnsupportedOperation,
    as_vector
)
from src.cones.generated import GeneratedCone
from src.cones.hermitian import herm_to_vec, vec_to_herm
from src.cones.operations import cone_from_json
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone

logger = logging.getLogger(__name__)

KINDS = ("quantum", "classical", "custom")


class GptModel:
    """
    A general probabilistic theory (single system).

    Attributes:
        kind: "quantum", "classical" or "custom"
        dim: Ambient dimension of the vector space
        state_cone: The cone C
        unit_effect: The unit effect U
        size: Hilbert-space dimension (quantum) or number of levels
            (classical); None for custom models
    """

    def __init__(
        self,
        kind: str,
        state_cone: AbstractCone,
        unit_effect: np.ndarray,
        size: Optional[int] = None
    ):
        if kind not in KINDS:
            raise ContractViolation(f"unknown model kind {kind!r}")
        self.kind = kind
        self.state_cone = state_cone
        self.dim = state_cone.ambient_dim
        self.unit_effect = as_vector(unit_effect, self.dim, "unit effect")
        self.unit_effect.setflags(write=False)
        self.size = size
        self._check_unit_effect()

    def _check_unit_effect(self) -> None:
        u = self.unit_effect
        cone = self.state_cone
        if isinstance(cone, OrthantCone):
            positive = bool(np.min(u) > DEFAULT_TOL)
        elif isinstance(cone, PsdCone):
            positive = bool(np.linalg.eigvalsh(vec_to_herm(u))[0] > DEFAULT_TOL)
        elif isinstance(cone, GeneratedCone):
            pairings = cone.generators.T @ u / np.linalg.norm(cone.generators, axis=0)
            positive = bool(np.min(pairings) > DEFAULT_TOL)
        else:
            raise ContractViolation(f"unsupported state cone {cone!r}")
        if not positive:
            raise ContractViolation("unit effect must be strictly positive on the state cone")

    @property
    def is_quantum(self) -> bool:
        return self.kind == "quantum"

    @property
    def is_classical(self) -> bool:
        return self.kind == "classical"

    def pair(self, e: np.ndarray, x: np.ndarray) -> float:
        """Canonical bilinear form <e, x>."""
        return float(np.dot(as_vector(e, self.dim, "functional"), as_vector(x, self.dim)))

    def normalization(self, x: np.ndarray) -> float:
        """<U, x>."""
        return float(self.unit_effect @ as_vector(x, self.dim))

    def check(self, x: Any, name: str = "vector") -> np.ndarray:
        """Coordinates of x (a vector or an object with a .vector) in this model."""
        if hasattr(x, "vector"):
            x = x.vector
        return as_vector(x, self.dim, name)

    def reference_state(self) -> np.ndarray:
        """Maximally mixed (quantum), uniform (classical) or a normalized interior state."""
        if self.is_quantum:
            return herm_to_vec(np.eye(self.size) / self.size)
        p = self.state_cone.interior_point()
        return p / (self.unit_effect @ p)

    def extreme_states(self) -> List[np.ndarray]:
        """
        The normalized extreme rays of a polyhedral state cone.

        Raises:
            UnsupportedOperation: For PSD state cones
        """
        cone = self.state_cone
        if isinstance(cone, OrthantCone):
            return [np.eye(self.dim)[i] / self.unit_effect[i] for i in range(self.dim)]
        if isinstance(cone, GeneratedCone):
            g = cone.generators
            return [g[:, k] / (self.unit_effect @ g[:, k]) for k in range(cone.n_generators)]
        raise UnsupportedOperation("state space of a PSD model has no finite vertex list")

    def distinct_states(self, count: int = 2) -> List[np.ndarray]:
        """First computational-basis states (quantum) or first vertices (polyhedral)."""
        if isinstance(self.state_cone, PsdCone):
            d = self.state_cone.d
            if count > d:
                raise ContractViolation(f"model has only {d} basis states")
            u = vec_to_herm(self.unit_effect)
            out = []
            for i in range(count):
                v = np.zeros((d, d))
                v[i, i] = 1.0
                out.append(herm_to_vec(v) / float(np.real(np.trace(u @ v))))
            return out
        states = self.extreme_states()
        if count > len(states):
            raise ContractViolation(f"model has only {len(states)} extreme states")
        return states[:count]

    def support(self, y: np.ndarray) -> float:
        """max { <y, w> : w a state }."""
        return float(self._support(self.check(y, "functional"))[0])

    def maximizer(self, y: np.ndarray) -> np.ndarray:
        """A state attaining support(y); lowest index among ties."""
        return self._support(self.check(y, "functional"))[1]

    def _support(self, y: np.ndarray):
        cone = self.state_cone
        u = self.unit_effect
        if isinstance(cone, OrthantCone):
            ratios = y / u
            k = int(np.argmax(ratios))
            w = np.zeros(self.dim)
            w[k] = 1.0 / u[k]
            return float(ratios[k]), w
        if isinstance(cone, GeneratedCone):
            g = cone.generators
            ratios = (g.T @ y) / (g.T @ u)
            k = int(np.argmax(ratios))
            return float(ratios[k]), g[:, k] / (u @ g[:, k])
        if isinstance(cone, PsdCone):
            try:
                vals, vecs = eigh(vec_to_herm(y), vec_to_herm(u))
            except LinAlgError as exc:
                raise ContractViolation(f"unit effect is not positive definite: {exc}") from exc
            v = vecs[:, -1]
            rho = np.outer(v, v.conj())
            w = herm_to_vec(rho)
            w = w / (u @ w)
            return float(vals[-1]), w
        raise UnsupportedOperation(f"support function on {cone!r}")

    def to_json(self) -> Dict[str, Any]:
        if self.kind == "custom":
            return {
                "kind": "custom",
                "dim": self.dim,
                "cone": self.state_cone.to_json(),
                "unit_effect": self.unit_effect.tolist()
            }
        return {"kind": self.kind, "dim": self.size}

    def __eq__(self, other) -> bool:
        if not isinstance(other, GptModel):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self) -> int:
        return hash((self.kind, self.dim, self.size))

    def __repr__(self) -> str:
        if self.kind == "custom":
            return f"GptModel(custom, dim={self.dim}, cone={self.state_cone!r})"
        return f"GptModel({self.kind}, d={self.size})"


def quantum_model(d: int) -> GptModel:
    """
    Quantum theory on C^d: Hermitian d x d matrices in the real Hermitian basis.

    Args:
        d: Hilbert-space dimension (at least 2)

    Raises:
        ContractViolation: If d < 2
    """
    if int(d) < 2:
        raise ContractViolation(f"quantum model needs d >= 2, got {d}")
    d = int(d)
    return GptModel("quantum", PsdCone(d), herm_to_vec(np.eye(d)), size=d)


def classical_model(d: int) -> GptModel:
    """
    Classical probability theory on d outcomes: orthant cone, all-ones unit effect.

    Raises:
        ContractViolation: If d < 2
    """
    if int(d) < 2:
        raise ContractViolation(f"classical model needs d >= 2, got {d}")
    d = int(d)
    return GptModel("classical", OrthantCone(d), np.ones(d), size=d)


def custom_model(cone: AbstractCone, unit_effect: np.ndarray) -> GptModel:
    """
    A model with an arbitrary supported cone and unit effect.

    Raises:
        ContractViolation: If the unit effect is not strictly positive on the cone
    """
    return GptModel("custom", cone, unit_effect)


def model_from_json(data: Dict[str, Any]) -> GptModel:
    """
    Build a model from {"kind", "dim"[, "cone", "unit_effect"]}.

    An enclosing {"model": {...}} wrapper is accepted.

    Raises:
        ModelError: Malformed description
    """
    if isinstance(data, dict) and "model" in data:
        data = data["model"]
    if not isinstance(data, dict):
        raise ModelError("model description must be an object")
    kind = data.get("kind")
    try:
        if kind == "quantum":
            return quantum_model(int(data["dim"]))
        if kind == "classical":
            return classical_model(int(data["dim"]))
        if kind == "custom":
            cone = cone_from_json(data["cone"])
            model = custom_model(cone, data["unit_effect"])
            if "dim" in data and int(data["dim"]) != model.dim:
                raise ModelError(f"model declares dim {data['dim']} but its cone has {model.dim}")
            return model
    except KeyError as exc:
        raise ModelError(f"model description is missing field {exc}") from exc
    except ModelError:
        raise
    except (TypeError, ValueError) as exc:
        raise ModelError(f"invalid model description: {exc}") from exc
    raise ModelError(f"unknown model kind {kind!r}")
