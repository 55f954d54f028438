"""
Free operation sets O used by the convertibility programs.

A set places a channel-matrix variable L (row-major, shape
model_out.dim x model_in.dim) into a ProgramBuilder together with the
constraints describing O. Every question asked about O is then linear in L:

    L(x)            = action_matrix(x, d_out) @ vec(L)
    <E, L(x)>       = <outer(E, x), L>
"""

import logging
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import nnls

from src.core.types import ContractViolation, ModelError, SOLVER_OBJECT_TOL, UnsupportedOperation
from src.cones.generated import GeneratedCone
from src.cones.orthant import OrthantCone
from src.gpt.channels import matrix_from_choi
from src.gpt.model import GptModel, classical_model, model_from_json, quantum_model
from src.gpt.objects import Channel
from src.robustness.free_sets import ChoiConeChannels, FreeChannelSet, ReplacerChannels
from src.solver.builder import ProgramBuilder, Variable
from src.solver.program import SolverSettings

logger = logging.getLogger(__name__)


def action_matrix(x: np.ndarray, d_out: int) -> np.ndarray:
    """A with A @ vec(L) == L @ x for row-major vec."""
    return np.kron(np.eye(d_out), np.asarray(x, dtype=float).reshape(1, -1))


class FreeOperationSet(ABC):
    """
    A convex closed set of channels between two models.

    Attributes:
        model_in: Input model
        model_out: Output model
        name: Label used in reports
        concatenation_closed: Asserted by the caller, recorded and never verified
    """

    def __init__(
        self,
        model_in: GptModel,
        model_out: GptModel,
        name: str,
        concatenation_closed: Optional[bool] = None
    ):
        self.model_in = model_in
        self.model_out = model_out
        self.name = name
        if concatenation_closed is None:
            concatenation_closed = model_in == model_out
        self.concatenation_closed = bool(concatenation_closed)

    @property
    def matrix_dim(self) -> int:
        return self.model_out.dim * self.model_in.dim

    @abstractmethod
    def add_channel_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        """Declare vec(L) constrained to L in O."""
        pass

    @abstractmethod
    def contains(self, channel: Channel, tol: float = 1e-8) -> bool:
        pass

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        pass

    @cached_property
    def contains_identity(self) -> bool:
        """Verified membership of the identity map."""
        if self.model_in != self.model_out:
            return False
        return self.contains(Channel.identity(self.model_in))

    def require_identity(self) -> None:
        """
        Raises:
            ContractViolation: If the identity map is not in the set
        """
        if not self.contains_identity:
            raise ContractViolation(f"{self.name} does not contain the identity map")

    def channel_from_vector(self, v: np.ndarray, tol: float = SOLVER_OBJECT_TOL) -> Channel:
        """Channel built from a solver-produced vec(L); membership is checked, not enforced."""
        channel = Channel(self.model_in, self.model_out,
                          np.asarray(v, dtype=float).reshape(self.model_out.dim, self.model_in.dim),
                          validate=False)
        if not self.contains(channel, tol):
            logger.warning("solver channel is outside %s at tolerance %.1e", self.name, tol)
        return channel

    def support(self, g: np.ndarray, settings: Optional[SolverSettings] = None) -> Tuple[float, Channel]:
        """
        max { <G, L> : L in O } for a functional matrix G of the channel's shape.

        Returns:
            Tuple (value, maximizing channel)
        """
        g = np.asarray(g, dtype=float).reshape(-1)
        if g.shape[0] != self.matrix_dim:
            raise ContractViolation(f"functional has {g.shape[0]} entries, expected {self.matrix_dim}")
        b = ProgramBuilder(f"support of {self.name}")
        ell = self.add_channel_variable(b, "channel")
        b.set_objective({ell: g}, maximize=True)
        result = b.solve(settings).require(f"support of {self.name}")
        return result.objective, self.channel_from_vector(result.value(ell))

    def best_value(self, effect: np.ndarray, x: np.ndarray, settings: Optional[SolverSettings] = None) -> float:
        """max over L in O of <E, L(x)>."""
        e = self.model_out.check(effect, "functional")
        x = self.model_in.check(x)
        value, _ = self.support(np.outer(e, x), settings)
        return value

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class ConicOperationSet(FreeOperationSet):
    """
    Normalization-preserving maps sending every generator of a polyhedral
    input cone into the output cone and fixing the listed points.
    """

    def __init__(
        self,
        model_in: GptModel,
        model_out: GptModel,
        fixed_points: Sequence = (),
        name: str = "cone-preserving channels",
        concatenation_closed: Optional[bool] = None
    ):
        cone = model_in.state_cone
        if isinstance(cone, OrthantCone):
            gens = np.eye(cone.ambient_dim)
        elif isinstance(cone, GeneratedCone):
            gens = cone.generators
        else:
            raise UnsupportedOperation("conic operation sets need a polyhedral input cone")
        self._generators = [gens[:, k] for k in range(gens.shape[1])]
        self.fixed_points = [model_in.check(f, "fixed point") for f in fixed_points]
        if self.fixed_points and model_in != model_out:
            raise ContractViolation("fixed points need equal input and output models")
        super().__init__(model_in, model_out, name, concatenation_closed)

    def add_channel_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        d_in, d_out = self.model_in.dim, self.model_out.dim
        ell = builder.add_variable(name, self.matrix_dim)
        builder.add_equality({ell: np.kron(self.model_out.unit_effect.reshape(1, -1), np.eye(d_in))},
                             self.model_in.unit_effect, f"{name} normalization")
        for k, g in enumerate(self._generators):
            builder.add_conic({ell: action_matrix(g, d_out)}, self.model_out.state_cone,
                              f"{name} generator {k}")
        for k, f in enumerate(self.fixed_points):
            builder.add_equality({ell: action_matrix(f, d_out)}, f, f"{name} fixed point {k}")
        return ell

    def contains(self, channel: Channel, tol: float = 1e-8) -> bool:
        m = channel.matrix
        scale = max(1.0, float(np.linalg.norm(m)))
        if np.max(np.abs(self.model_out.unit_effect @ m - self.model_in.unit_effect)) > tol * scale:
            return False
        if not all(self.model_out.state_cone.member(m @ g, tol) for g in self._generators):
            return False
        return all(np.max(np.abs(m @ f - f)) <= tol * scale for f in self.fixed_points)

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": "conic",
            "name": self.name,
            "fixed_points": [f.tolist() for f in self.fixed_points],
            "concatenation_closed": self.concatenation_closed
        }


class ChoiOperationSet(FreeOperationSet):
    """Quantum channels whose normalized Choi matrices form a free channel set."""

    def __init__(self, channels: FreeChannelSet, concatenation_closed: Optional[bool] = None):
        self.channels = channels
        d_in, d_out = channels.d_in, channels.d_out
        basis = np.eye(channels.choi_dim)
        # vec(L) as a linear function of the Choi coordinates
        self._from_choi = np.array([matrix_from_choi(basis[k], d_in, d_out).reshape(-1)
                                    for k in range(channels.choi_dim)]).T
        super().__init__(channels.model_in, channels.model_out, channels.name, concatenation_closed)

    def add_channel_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        j, t = self.channels.add_choi_cone(builder, f"{name} choi")
        builder.add_equality({t: 1.0}, 1.0, f"{name} normalization")
        ell = builder.add_variable(name, self.matrix_dim)
        builder.add_equality({ell: 1.0, j: -self._from_choi}, np.zeros(self.matrix_dim), f"{name} from choi")
        return ell

    def contains(self, channel: Channel, tol: float = 1e-8) -> bool:
        return self.channels.contains(channel, tol)

    def to_json(self) -> Dict[str, Any]:
        out = dict(self.channels.to_json())
        out["concatenation_closed"] = self.concatenation_closed
        return out


class ConvexHullOperationSet(FreeOperationSet):
    """Convex combinations of finitely many listed channels."""

    def __init__(
        self,
        channels: Sequence[Channel],
        name: str = "convex hull",
        concatenation_closed: bool = False
    ):
        if len(channels) == 0:
            raise ContractViolation("a convex hull needs at least one channel")
        first = channels[0]
        for ch in channels[1:]:
            if ch.model_in != first.model_in or ch.model_out != first.model_out:
                raise ContractViolation("hull channels must share input and output models")
        self.channels: List[Channel] = list(channels)
        self._vertices = np.array([ch.matrix.reshape(-1) for ch in channels]).T
        super().__init__(first.model_in, first.model_out, name, concatenation_closed)

    def add_channel_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        k = len(self.channels)
        weights = builder.add_variable(f"{name} weights", k, OrthantCone(k))
        builder.add_equality({weights: np.ones(k)}, 1.0, f"{name} weights sum")
        ell = builder.add_variable(name, self.matrix_dim)
        builder.add_equality({ell: 1.0, weights: -self._vertices}, np.zeros(self.matrix_dim), f"{name} hull")
        return ell

    def contains(self, channel: Channel, tol: float = 1e-8) -> bool:
        target = channel.matrix.reshape(-1)
        scale = max(1.0, float(np.linalg.norm(target)))
        a = np.vstack([self._vertices, scale * np.ones((1, len(self.channels)))])
        _, residual = nnls(a, np.concatenate([target, [scale]]))
        return residual <= tol * scale

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": "hull",
            "name": self.name,
            "channels": [ch.matrix.tolist() for ch in self.channels],
            "concatenation_closed": self.concatenation_closed
        }


def doubly_stochastic(d: int) -> ConicOperationSet:
    """Classical channels fixing the uniform distribution."""
    model = classical_model(d)
    return ConicOperationSet(model, model, [np.full(d, 1.0 / d)], "doubly stochastic channels", True)


def all_classical_channels(d: int) -> ConicOperationSet:
    model = classical_model(d)
    return ConicOperationSet(model, model, (), "classical channels", True)


def unital_quantum(d: int) -> ChoiOperationSet:
    model = quantum_model(d)
    return ChoiOperationSet(ChoiConeChannels(model, model, unital=True), True)


def all_quantum(d: int) -> ChoiOperationSet:
    model = quantum_model(d)
    return ChoiOperationSet(ChoiConeChannels(model, model), True)


def conic_operations(
    model: GptModel,
    fixed_points: Sequence = (),
    model_out: Optional[GptModel] = None,
    name: str = "cone-preserving channels",
    concatenation_closed: Optional[bool] = None
) -> ConicOperationSet:
    """Cone- and normalization-preserving maps on a polyhedral model, optionally fixing points."""
    return ConicOperationSet(model, model_out or model, fixed_points, name, concatenation_closed)


def convex_hull_operations(channels: Sequence[Channel], concatenation_closed: bool = False) -> ConvexHullOperationSet:
    return ConvexHullOperationSet(channels, concatenation_closed=concatenation_closed)


def operations_from_json(data: Dict[str, Any], model: Optional[GptModel] = None) -> FreeOperationSet:
    """
    Build an operation set from its JSON description.

    Recognized kinds: "doubly_stochastic" and "classical" ({"dim"}),
    "unital" and "quantum" ({"dim"}), "choi" (flags of the Choi-cone channel
    set), "replacer", "conic" ({"fixed_points"}, needs a polyhedral model) and
    "hull" ({"channels": list of matrices}).

    Raises:
        ModelError: Malformed description
    """
    if not isinstance(data, dict):
        raise ModelError("operation set description must be an object")
    kind = data.get("kind")
    closed = data.get("concatenation_closed")
    try:
        if model is None and "model" in data:
            model = model_from_json(data["model"])
        dim = int(data["dim"]) if "dim" in data else (model.size if model is not None else None)
        if kind == "doubly_stochastic":
            return doubly_stochastic(dim)
        if kind == "classical":
            return all_classical_channels(dim)
        if kind == "unital":
            return unital_quantum(dim)
        if kind == "quantum":
            return all_quantum(dim)
        if model is None:
            raise ModelError(f"operation set of kind {kind!r} needs a model")
        if kind == "choi":
            channels = ChoiConeChannels(
                model, model,
                diagonal=bool(data.get("diagonal", False)),
                ppt=bool(data.get("ppt", False)),
                unital=bool(data.get("unital", False)),
                incoherent=bool(data.get("incoherent", False))
            )
            return ChoiOperationSet(channels, closed)
        if kind == "replacer":
            return ChoiOperationSet(ReplacerChannels(model, model), closed)
        if kind == "conic":
            return ConicOperationSet(model, model, data.get("fixed_points", ()),
                                     data.get("name", "cone-preserving channels"), closed)
        if kind == "hull":
            channels = [Channel(model, model, np.asarray(m, dtype=float)) for m in data["channels"]]
            return ConvexHullOperationSet(channels, data.get("name", "convex hull"), bool(closed))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed operation set: {exc}") from exc
    raise ModelError(f"unknown operation set kind {kind!r}")
