"""
Value types of a GPT model: states, effects, measurements, channels,
subchannels and state ensembles.

Every constructor validates its invariants and raises ContractViolation
otherwise. Objects are immutable; their coordinate arrays are read-only.
"""

from typing import List, Sequence

import numpy as np

from src.core.types import ContractViolation, UnsupportedOperation, VALIDATION_TOL, as_vector
from src.cones.generated import GeneratedCone
from src.cones.hermitian import vec_to_herm
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone
from .model import GptModel

# Transformation set used when a channel is checked for cone preservation only
DEFAULT_TRANSFORMATIONS = "cone_and_normalization_preserving"


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


class State:
    """
    A normalized element of the state cone.

    Attributes:
        model: Owning model
        vector: Coordinates
    """

    def __init__(self, model: GptModel, vector: Sequence[float], tol: float = VALIDATION_TOL):
        v = model.check(vector, "state")
        if not model.state_cone.member(v, tol):
            raise ContractViolation("state is not in the state cone")
        norm = model.normalization(v)
        if abs(norm - 1.0) > tol * max(1.0, float(np.linalg.norm(v))):
            raise ContractViolation(f"state has normalization {norm!r}, expected 1")
        self.model = model
        self.vector = _frozen(v)

    def __repr__(self) -> str:
        return f"State({np.array2string(self.vector, precision=6)})"


class Effect:
    """
    A functional E with 0 <= E <= U in the dual order.

    Attributes:
        model: Owning model
        vector: Coordinates
    """

    def __init__(self, model: GptModel, vector: Sequence[float], tol: float = VALIDATION_TOL):
        e = model.check(vector, "effect")
        cone = model.state_cone
        if not cone.dual_member(e, tol):
            raise ContractViolation("effect is not in the dual cone")
        if not cone.dual_member(model.unit_effect - e, tol):
            raise ContractViolation("unit effect minus effect is not in the dual cone")
        self.model = model
        self.vector = _frozen(e)

    def __repr__(self) -> str:
        return f"Effect({np.array2string(self.vector, precision=6)})"


class Measurement:
    """
    A finite list of effects summing to the unit effect.

    Attributes:
        model: Owning model
        effects: Effect coordinate arrays, one per outcome
    """

    def __init__(self, model: GptModel, effects: Sequence[Sequence[float]], tol: float = VALIDATION_TOL):
        if len(effects) == 0:
            raise ContractViolation("a measurement needs at least one effect")
        vecs = [Effect(model, e, tol).vector for e in effects]
        total = np.sum(vecs, axis=0)
        err = float(np.max(np.abs(total - model.unit_effect)))
        if err > tol * max(1.0, float(np.linalg.norm(model.unit_effect))):
            raise ContractViolation(f"effects sum to the unit effect only up to {err:.3e}")
        self.model = model
        self.effects: List[np.ndarray] = vecs

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def probabilities(self, state) -> np.ndarray:
        """Outcome distribution <M_i, w>."""
        w = self.model.check(state, "state")
        return np.array([float(e @ w) for e in self.effects])

    def matrix(self) -> np.ndarray:
        """Effects as rows."""
        return np.array(self.effects)

    @classmethod
    def trivial(cls, model: GptModel, n_outcomes: int = 1) -> "Measurement":
        """{U, 0, ..., 0}."""
        effects = [model.unit_effect] + [np.zeros(model.dim)] * (n_outcomes - 1)
        return cls(model, effects)

    @classmethod
    def computational(cls, model: GptModel) -> "Measurement":
        """Projective basis measurement (quantum) or identity measurement (classical)."""
        if model.kind not in ("quantum", "classical"):
            raise UnsupportedOperation("computational measurement needs a quantum or classical model")
        return cls(model, [np.eye(model.dim)[i] for i in range(model.size)])

    @classmethod
    def repair(cls, model: GptModel, effects: Sequence[np.ndarray], tol: float = 1e-6) -> "Measurement":
        """
        Build a measurement from solver output.

        The normalization defect U - sum E_i is added to the last effect and
        the result is validated at the looser tolerance.
        """
        vecs = [np.array(e, dtype=float) for e in effects]
        vecs[-1] = vecs[-1] + (model.unit_effect - np.sum(vecs, axis=0))
        return cls(model, vecs, tol)

    def __repr__(self) -> str:
        return f"Measurement({self.n_outcomes} outcomes)"


def _check_cone_preserving(model_in: GptModel, model_out: GptModel, matrix: np.ndarray, tol: float) -> None:
    cin, cout = model_in.state_cone, model_out.state_cone
    if isinstance(cin, (OrthantCone, GeneratedCone)):
        gens = np.eye(cin.ambient_dim) if isinstance(cin, OrthantCone) else cin.generators
        for k in range(gens.shape[1]):
            if not cout.member(matrix @ gens[:, k], tol):
                raise ContractViolation(f"map sends state-cone generator {k} outside the output cone")
        return
    if isinstance(cin, PsdCone) and isinstance(cout, OrthantCone):
        for j in range(matrix.shape[0]):
            if not cin.dual_member(matrix[j], tol):
                raise ContractViolation(f"output coordinate {j} is not a positive functional")
        return
    if isinstance(cin, PsdCone) and isinstance(cout, PsdCone):
        from .channels import choi_of_matrix
        j = choi_of_matrix(matrix, cin.d, cout.d)
        lam = float(np.linalg.eigvalsh(vec_to_herm(j))[0])
        if lam < -tol * max(1.0, float(np.linalg.norm(j))):
            raise ContractViolation(f"Choi matrix has eigenvalue {lam:.3e}: map is not completely positive")
        return
    raise UnsupportedOperation(
        f"cone preservation from {cin.variant} to {cout.variant} cones is not checked"
    )


class Channel:
    """
    A linear map between models, stored as a dense matrix on coordinates.

    Valid channels are normalization-preserving (U'^T L == U^T) and
    cone-preserving; between quantum models complete positivity is checked
    through the Choi matrix.

    Attributes:
        model_in: Input model
        model_out: Output model
        matrix: Array of shape (model_out.dim, model_in.dim)
        transformations: Name of the transformation class checked
    """

    def __init__(
        self,
        model_in: GptModel,
        model_out: GptModel,
        matrix: np.ndarray,
        tol: float = VALIDATION_TOL,
        validate: bool = True
    ):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (model_out.dim, model_in.dim):
            raise ContractViolation(
                f"channel matrix has shape {m.shape}, expected ({model_out.dim}, {model_in.dim})"
            )
        if not np.all(np.isfinite(m)):
            raise ContractViolation("channel matrix contains NaN or Inf entries")
        self.model_in = model_in
        self.model_out = model_out
        self.matrix = _frozen(m)
        self.transformations = (
            "completely_positive" if model_in.is_quantum and model_out.is_quantum
            else DEFAULT_TRANSFORMATIONS
        )
        if validate:
            self._validate(tol)

    def _validate(self, tol: float) -> None:
        err = float(np.max(np.abs(self.model_out.unit_effect @ self.matrix - self.model_in.unit_effect)))
        if err > tol * max(1.0, float(np.linalg.norm(self.model_in.unit_effect))):
            raise ContractViolation(f"map is not normalization-preserving (defect {err:.3e})")
        _check_cone_preserving(self.model_in, self.model_out, self.matrix, tol)

    def __call__(self, x) -> np.ndarray:
        return self.matrix @ self.model_in.check(x)

    def dual(self, e) -> np.ndarray:
        """Action of the dual map on a functional of the output space."""
        return self.matrix.T @ self.model_out.check(e, "functional")

    def compose(self, other: "Channel") -> "Channel":
        """self after other."""
        return type(self)(other.model_in, self.model_out, self.matrix @ other.matrix, validate=False)

    @classmethod
    def identity(cls, model: GptModel) -> "Channel":
        return cls(model, model, np.eye(model.dim))

    def is_completely_positive(self, tol: float = VALIDATION_TOL) -> bool:
        """Choi positivity (quantum models only)."""
        if not (self.model_in.is_quantum and self.model_out.is_quantum):
            raise UnsupportedOperation("complete positivity is only defined between quantum models")
        from .channels import choi
        j = choi(self)
        return float(np.linalg.eigvalsh(vec_to_herm(j))[0]) >= -tol * max(1.0, float(np.linalg.norm(j)))

    def __repr__(self) -> str:
        return f"Channel({self.model_in!r} -> {self.model_out!r})"


class Subchannel(Channel):
    """
    A cone-preserving map with <U', L x> <= <U, x> on the state cone.
    """

    def _validate(self, tol: float) -> None:
        _check_cone_preserving(self.model_in, self.model_out, self.matrix, tol)
        defect = self.model_in.unit_effect - self.model_out.unit_effect @ self.matrix
        if not self.model_in.state_cone.dual_member(defect, tol):
            raise ContractViolation("subchannel increases normalization on some state")


class StateEnsemble:
    """
    Probabilities with states of one model; zero probabilities are allowed.

    Attributes:
        model: Common model
        probs: Probability vector
        states: State coordinate arrays
    """

    def __init__(self, model: GptModel, probs: Sequence[float], states: Sequence, tol: float = VALIDATION_TOL):
        p = as_vector(probs, name="probabilities")
        if len(states) != p.shape[0]:
            raise ContractViolation(f"{p.shape[0]} probabilities for {len(states)} states")
        if p.shape[0] == 0:
            raise ContractViolation("an ensemble needs at least one state")
        if np.min(p) < -1e-12 or abs(float(np.sum(p)) - 1.0) > 1e-12 * max(1, p.shape[0]):
            raise ContractViolation("ensemble probabilities must be nonnegative and sum to 1")
        self.model = model
        self.probs = _frozen(np.maximum(p, 0.0))
        self.states: List[np.ndarray] = [State(model, s, tol).vector for s in states]

    @classmethod
    def uniform(cls, model: GptModel, states: Sequence, tol: float = VALIDATION_TOL) -> "StateEnsemble":
        n = len(states)
        return cls(model, np.full(n, 1.0 / n), states, tol)

    def __len__(self) -> int:
        return len(self.states)

    def weighted(self) -> List[np.ndarray]:
        """The unnormalized vectors p_i w_i."""
        return [p * s for p, s in zip(self.probs, self.states)]

    def __repr__(self) -> str:
        return f"StateEnsemble({len(self)} states)"


def vectors_of(objects: Sequence) -> List[np.ndarray]:
    """Coordinates of states/effects or raw vectors."""
    return [np.asarray(getattr(o, "vector", o), dtype=float) for o in objects]


def ensure_measurement(model: GptModel, m, tol: float = VALIDATION_TOL) -> Measurement:
    """Accept a Measurement or a list of effect vectors."""
    if isinstance(m, Measurement):
        return m
    return Measurement(model, list(m), tol)


def clean_state(model: GptModel, x) -> np.ndarray:
    """Pull a solver-produced point back onto the normalized state space."""
    x = model.check(x)
    try:
        x = model.state_cone.project(x)
    except UnsupportedOperation:
        pass
    return x / model.normalization(x)
