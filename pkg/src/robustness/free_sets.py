"""
Free sets: free states F, free effect cones E_F and free channel sets O_F.

Every free set knows how to place the cone it generates into a
ProgramBuilder, which is all the robustness programs need:

    cone(F)   = { t s : t >= 0, s in F }
    cone(O_F) = { t J : t >= 0, J the Choi matrix of a free channel }
"""

import logging
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from src.core.types import (
    ContractViolation,
    DEFAULT_TOL,
    ModelError,
    UnsupportedOperation,
    as_vector
)
from src.cones.generated import GeneratedCone
from src.cones.hermitian import herm_to_vec, linear_map_matrix, vec_to_herm
from src.cones.operations import cone_from_json
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone
from src.gpt.channels import choi, partial_trace, partial_transpose
from src.gpt.model import GptModel
from src.gpt.norms import EffectConeFamily, order_unit_norm
from src.gpt.objects import Channel, Measurement, State
from src.solver.builder import ProgramBuilder, Variable
from src.solver.program import SolveStatus, SolverSettings

logger = logging.getLogger(__name__)

# Well above the solver feasibility tolerance; interior_point() has unit norm
INTERIOR_MARGIN = 1e-5


class FreeStateSet(ABC):
    """
    Abstract convex closed set of free states F inside the state space.

    Attributes:
        model: The model
        name: Label used in reports
    """

    def __init__(self, model: GptModel, name: str):
        self.model = model
        self.name = name

    @abstractmethod
    def add_cone_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        """Declare a variable constrained to cone(F)."""
        pass

    @abstractmethod
    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        """Membership of a state in F."""
        pass

    @property
    @abstractmethod
    def polyhedral(self) -> bool:
        pass

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        pass

    def generators(self) -> List[np.ndarray]:
        """Extreme points of a polyhedral F."""
        raise UnsupportedOperation(f"{self.name} is not given by generators")

    def support(self, y, settings: Optional[SolverSettings] = None) -> Tuple[float, np.ndarray]:
        """
        max { <y, s> : s in F } and a maximizer.

        Generator sets are evaluated exactly with lowest-index ties.
        """
        y = self.model.check(y, "functional")
        if self.polyhedral:
            gens = self.generators()
            vals = [float(y @ g) for g in gens]
            k = int(np.argmax(vals))
            return vals[k], gens[k]
        b = ProgramBuilder(f"support of {self.name}")
        tau = self.add_cone_variable(b, "free state")
        b.add_equality({tau: self.model.unit_effect}, 1.0, "normalization")
        b.set_objective({tau: y}, maximize=True)
        result = b.solve(settings).require(f"support of {self.name}")
        return result.objective, result.value(tau)

    @cached_property
    def interior_margin(self) -> float:
        """
        Largest t <= 1 with s - t e in C for some s in F, e the reference
        interior point of C.
        """
        model = self.model
        b = ProgramBuilder(f"interior margin of {self.name}")
        tau = self.add_cone_variable(b, "free state")
        t = b.add_variable("margin", 1)
        e = model.state_cone.interior_point()
        b.add_equality({tau: model.unit_effect}, 1.0, "normalization")
        b.add_conic({tau: 1.0, t: -e.reshape(-1, 1)}, model.state_cone, "margin")
        b.add_conic({t: -1.0}, OrthantCone(1), "margin cap", constant=1.0)
        b.set_objective({t: 1.0}, maximize=True)
        result = b.solve()
        if result.status is SolveStatus.PRIMAL_INFEASIBLE:
            raise ContractViolation(f"free set {self.name} is empty")
        return result.require(f"interior margin of {self.name}").objective

    @property
    def interior(self) -> bool:
        """Whether F contains an interior point of the state cone."""
        return self.interior_margin > INTERIOR_MARGIN

    @abstractmethod
    def span_basis(self) -> np.ndarray:
        """Matrix whose columns span the linear span of F."""
        pass

    @cached_property
    def spans(self) -> bool:
        """Whether span F is the whole space."""
        return bool(np.linalg.matrix_rank(self.span_basis()) == self.model.dim)

    def net(
        self,
        epsilon: float = 1e-3,
        rng: Optional[np.random.Generator] = None,
        max_points: int = 400,
        samples: int = 200,
        settings: Optional[SolverSettings] = None
    ) -> Tuple[List[np.ndarray], float]:
        """
        A finite subset of F approximating it to epsilon in base-norm
        Hausdorff distance.

        Generator sets return their generators with resolution 0. Otherwise
        points are support maximizers of random functionals; the resolution
        is the largest support-function gap over order-unit-normalized random
        functionals, an estimate of the Hausdorff distance.

        Returns:
            Tuple (points, resolution)
        """
        if self.polyhedral:
            return self.generators(), 0.0
        rng = rng if rng is not None else np.random.default_rng(1234)
        model = self.model
        points: List[np.ndarray] = []
        directions = [self._random_functional(rng) for _ in range(samples)]
        supports = [self.support(y, settings)[0] for y in directions]
        resolution = float("inf")
        batch = 16
        while len(points) < max_points:
            for _ in range(batch):
                points.append(self.support(self._random_functional(rng), settings)[1])
            arr = np.array(points)
            gaps = [s - float(np.max(arr @ y)) for y, s in zip(directions, supports)]
            resolution = max(0.0, max(gaps))
            if resolution <= epsilon:
                break
            batch *= 2
        logger.info("free-state net of %s: %d points, resolution %.3e", self.name, len(points), resolution)
        if resolution > epsilon:
            logger.warning("free-state net resolution %.3e exceeds %.1e", resolution, epsilon)
        return points, resolution

    def _random_functional(self, rng: np.random.Generator) -> np.ndarray:
        y = rng.standard_normal(self.model.dim)
        return y / order_unit_norm(self.model, y)


class GeneratorFreeSet(FreeStateSet):
    """
    F = convex hull of finitely many states.

    Attributes:
        cone: GeneratedCone spanned by the generators
    """

    def __init__(self, model: GptModel, states: Sequence, name: str = "free states", tol: float = 1e-9):
        super().__init__(model, name)
        if len(states) == 0:
            raise ContractViolation("a generator free set needs at least one state")
        self._states = [State(model, s, tol).vector for s in states]
        self.cone = GeneratedCone(self._states, warn_degenerate=False)

    @property
    def polyhedral(self) -> bool:
        return True

    def generators(self) -> List[np.ndarray]:
        return list(self._states)

    def add_cone_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        return builder.add_variable(name, self.model.dim, self.cone)

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = self.model.check(x)
        if abs(self.model.normalization(x) - 1.0) > tol * max(1.0, float(np.linalg.norm(x))):
            return False
        return self.cone.member(x, tol)

    def span_basis(self) -> np.ndarray:
        return np.array(self._states).T

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "generators", "generators": [g.tolist() for g in self._states]}

    def __repr__(self) -> str:
        return f"GeneratorFreeSet({self.name}, {len(self._states)} states)"


class SpectrahedralFreeSet(FreeStateSet):
    """
    F = { s in K : B s = c, <U, s> = 1 } for a cone K inside the state cone.

    Attributes:
        cone: The cone K (defaults to the state cone)
        matrix: B
        rhs: c
    """

    def __init__(
        self,
        model: GptModel,
        matrix: np.ndarray,
        rhs: np.ndarray,
        cone=None,
        name: str = "free states"
    ):
        super().__init__(model, name)
        b = np.asarray(matrix, dtype=float)
        if b.size == 0:
            b = np.zeros((0, model.dim))
        if b.ndim != 2 or b.shape[1] != model.dim:
            raise ContractViolation(f"constraint matrix has shape {b.shape}, expected (m, {model.dim})")
        self.matrix = b
        self.rhs = as_vector(rhs, b.shape[0], "constraint rhs")
        self.cone = cone if cone is not None else model.state_cone
        if self.cone.ambient_dim != model.dim:
            raise ContractViolation("free-set cone dimension does not match the model")
        # homogenized rows (B - c U^T) tau = 0
        self._homogeneous = self.matrix - np.outer(self.rhs, model.unit_effect)
        # fails on empty sets
        _ = self.interior_margin

    @property
    def polyhedral(self) -> bool:
        return False

    def add_cone_variable(self, builder: ProgramBuilder, name: str) -> Variable:
        tau = builder.add_variable(name, self.model.dim, self.cone)
        if self._homogeneous.shape[0]:
            builder.add_equality({tau: self._homogeneous}, np.zeros(self._homogeneous.shape[0]),
                                 f"{name} in {self.name}")
        return tau

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = self.model.check(x)
        scale = max(1.0, float(np.linalg.norm(x)))
        if abs(self.model.normalization(x) - 1.0) > tol * scale:
            return False
        if not self.cone.member(x, tol) or not self.model.state_cone.member(x, tol):
            return False
        if self.matrix.shape[0] and np.max(np.abs(self.matrix @ x - self.rhs)) > tol * scale:
            return False
        return True

    def span_basis(self) -> np.ndarray:
        if self._homogeneous.shape[0] == 0:
            return np.eye(self.model.dim)
        return null_space(self._homogeneous)

    def to_json(self) -> Dict[str, Any]:
        out = {"kind": "spectrahedral", "matrix": self.matrix.tolist(), "rhs": self.rhs.tolist()}
        if self.cone is not self.model.state_cone:
            out["cone"] = self.cone.to_json()
        return out

    def __repr__(self) -> str:
        return f"SpectrahedralFreeSet({self.name}, {self.matrix.shape[0]} rows)"


def diagonal_states(model: GptModel) -> GeneratorFreeSet:
    """Incoherent quantum states: convex hull of |i><i|."""
    if not model.is_quantum:
        raise UnsupportedOperation("diagonal states are defined on the quantum backend")
    return GeneratorFreeSet(model, [np.eye(model.dim)[i] for i in range(model.size)], "incoherent states")


def uniform_point(model: GptModel) -> GeneratorFreeSet:
    """F = {reference state} (uniform distribution for classical models)."""
    return GeneratorFreeSet(model, [model.reference_state()], "uniform state")


def interval_set(model: GptModel, lo: float, hi: float) -> GeneratorFreeSet:
    """Classical two-level set {(q, 1 - q) : lo <= q <= hi}."""
    if not (model.is_classical and model.dim == 2):
        raise ContractViolation("interval free sets live in the two-level classical model")
    if not 0.0 <= lo <= hi <= 1.0:
        raise ContractViolation(f"invalid interval [{lo}, {hi}]")
    points = [np.array([lo, 1.0 - lo])]
    if hi > lo:
        points.append(np.array([hi, 1.0 - hi]))
    return GeneratorFreeSet(model, points, f"interval [{lo}, {hi}]")


class FreeEffectCone(EffectConeFamily):
    """
    A closed convex cone of free effects E_F inside C*.

    Attributes:
        strictly_positive: Whether E_F contains a measurement of strictly
            positive effects (equivalently U in E_F)
    """

    def __init__(self, model: GptModel, cone, name: str = "free effects"):
        super().__init__(model, cone, name)
        self.strictly_positive = self.contains(model.unit_effect)
        if not self.strictly_positive:
            logger.warning("free effect cone %s contains no strictly positive measurement", name)

    def to_json(self) -> Dict[str, Any]:
        if isinstance(self.cone, GeneratedCone):
            return {"kind": "generators", "generators": self.cone.generators.T.tolist()}
        return {"kind": "all"}


def trivial_effects(model: GptModel) -> FreeEffectCone:
    """E_F = {c U : c >= 0}."""
    return FreeEffectCone(model, GeneratedCone([model.unit_effect], warn_degenerate=False), "trivial effects")


def all_effects(model: GptModel) -> FreeEffectCone:
    """E_F = C* (self-dual state cones only)."""
    if not model.state_cone.is_self_dual:
        raise UnsupportedOperation("the dual of a generated state cone has no generator list")
    return FreeEffectCone(model, model.state_cone, "all effects")


def effects_from_measurements(model: GptModel, measurements: Sequence[Measurement]) -> FreeEffectCone:
    """Conic hull of the nonzero effects of a finite measurement list."""
    effects = [e for m in measurements for e in m.effects if np.linalg.norm(e) > 1e-12]
    if not effects:
        raise ContractViolation("no nonzero effects in the measurement list")
    return FreeEffectCone(model, GeneratedCone(effects, warn_degenerate=False), "measurement effects")


def diagonal_effects(model: GptModel) -> FreeEffectCone:
    """Incoherent effects: conic hull of |i><i|."""
    if not model.is_quantum:
        raise UnsupportedOperation("diagonal effects are defined on the quantum backend")
    gens = [np.eye(model.dim)[i] for i in range(model.size)]
    return FreeEffectCone(model, GeneratedCone(gens, warn_degenerate=False), "diagonal effects")


def _masked_coordinates(mask: np.ndarray) -> np.ndarray:
    """Rows extracting the Hermitian coordinates of J * mask (zero rows dropped)."""
    d = mask.shape[0]
    rows = linear_map_matrix(lambda m: m * mask, d, d)
    keep = np.linalg.norm(rows, axis=1) > 1e-12
    return rows[keep]


class FreeChannelSet(ABC):
    """
    A convex closed set O_F of quantum channels described in Choi space.

    Attributes:
        model_in: Input quantum model
        model_out: Output quantum model
        name: Label used in reports
    """

    def __init__(self, model_in: GptModel, model_out: GptModel, name: str):
        if not (model_in.is_quantum and model_out.is_quantum):
            raise UnsupportedOperation("free channel sets are described on the quantum backend")
        self.model_in = model_in
        self.model_out = model_out
        self.name = name
        self.d_in = model_in.size
        self.d_out = model_out.size
        self.choi_dim = (self.d_in * self.d_out) ** 2
        self._tr_out = linear_map_matrix(
            lambda m: partial_trace(m, (self.d_in, self.d_out), keep=0), self.d_in * self.d_out, self.d_in)
        self._identity_in = herm_to_vec(np.eye(self.d_in))

    @abstractmethod
    def add_choi_cone(self, builder: ProgramBuilder, name: str) -> Tuple[Variable, Variable]:
        """
        Declare J in cone(O_F) together with its scale t (Tr_out J = t I).

        Returns:
            Tuple (J variable, scale variable)
        """
        pass

    @abstractmethod
    def contains_choi(self, j: np.ndarray, tol: float = 1e-8) -> bool:
        """Membership of a normalized Choi matrix."""
        pass

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        pass

    def contains(self, channel: Channel, tol: float = 1e-8) -> bool:
        return self.contains_choi(choi(channel), tol)

    def support(self, y, settings: Optional[SolverSettings] = None) -> Tuple[float, np.ndarray]:
        """max { Tr[Y J] : J the Choi matrix of a free channel } and a maximizer."""
        y = as_vector(y, self.choi_dim, "Choi functional")
        b = ProgramBuilder(f"support of {self.name}")
        j, t = self.add_choi_cone(b, "free channel")
        b.add_equality({t: 1.0}, 1.0, "normalization")
        b.set_objective({j: y}, maximize=True)
        result = b.solve(settings).require(f"support of {self.name}")
        return result.objective, result.value(j)

    @property
    def interior(self) -> bool:
        """Whether the completely depolarizing channel, whose Choi matrix is full rank, is free."""
        return self.contains_choi(self.depolarizing_choi())

    def depolarizing_choi(self) -> np.ndarray:
        return herm_to_vec(np.eye(self.d_in * self.d_out) / self.d_out)

    def _trace_preserving(self, j: np.ndarray, tol: float) -> bool:
        return float(np.max(np.abs(self._tr_out @ j - self._identity_in))) <= tol * max(1.0, float(np.linalg.norm(j)))


class ReplacerChannels(FreeChannelSet):
    """O_F = { rho -> tr(rho) s : s a state }, Choi matrices I (x) s."""

    def __init__(self, model_in: GptModel, model_out: GptModel):
        super().__init__(model_in, model_out, "replacer channels")
        d_in, d_out = self.d_in, self.d_out
        self._embed = linear_map_matrix(lambda s: np.kron(np.eye(d_in), s), d_out, d_in * d_out)

    def add_choi_cone(self, builder: ProgramBuilder, name: str) -> Tuple[Variable, Variable]:
        s = builder.add_variable(f"{name} output", self.d_out ** 2, PsdCone(self.d_out))
        j = builder.add_variable(name, self.choi_dim)
        t = builder.add_variable(f"{name} scale", 1)
        builder.add_equality({j: 1.0, s: -self._embed}, np.zeros(self.choi_dim), f"{name} replacer form")
        builder.add_equality({s: herm_to_vec(np.eye(self.d_out)), t: -1.0}, 0.0, f"{name} scale")
        return j, t

    def contains_choi(self, j: np.ndarray, tol: float = 1e-8) -> bool:
        j = as_vector(j, self.choi_dim, "Choi matrix")
        m = vec_to_herm(j)
        s = partial_trace(m, (self.d_in, self.d_out), keep=1) / self.d_in
        if np.linalg.eigvalsh(s)[0] < -tol:
            return False
        return float(np.max(np.abs(m - np.kron(np.eye(self.d_in), s)))) <= tol * max(1.0, float(np.linalg.norm(j))) \
            and self._trace_preserving(j, tol)

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "replacer"}


class ChoiConeChannels(FreeChannelSet):
    """
    Channels whose Choi matrix satisfies any combination of:

    diagonal   -- J diagonal (classical-to-classical channels)
    ppt        -- partial transpose of J is PSD
    unital     -- L(I) = I (equal input and output dimension)
    incoherent -- diagonal inputs map to diagonal outputs
    """

    def __init__(
        self,
        model_in: GptModel,
        model_out: GptModel,
        diagonal: bool = False,
        ppt: bool = False,
        unital: bool = False,
        incoherent: bool = False
    ):
        tags = [n for n, f in (("diagonal", diagonal), ("ppt", ppt), ("unital", unital),
                               ("incoherent", incoherent)) if f]
        super().__init__(model_in, model_out, "channels" if not tags else " ".join(tags) + " channels")
        if unital and self.d_in != self.d_out:
            raise ContractViolation("unital channels need equal input and output dimension")
        self.diagonal = diagonal
        self.ppt = ppt
        self.unital = unital
        self.incoherent = incoherent
        dim = self.d_in * self.d_out
        self._linear_rows: List[np.ndarray] = []
        if diagonal:
            self._linear_rows.append(_masked_coordinates(1.0 - np.eye(dim)))
        if incoherent:
            mask = np.zeros((dim, dim))
            for i in range(self.d_in):
                block = slice(i * self.d_out, (i + 1) * self.d_out)
                mask[block, block] = 1.0 - np.eye(self.d_out)
            self._linear_rows.append(_masked_coordinates(mask))
        self._zero_rows = np.vstack(self._linear_rows) if self._linear_rows else np.zeros((0, self.choi_dim))
        self._tr_in = linear_map_matrix(
            lambda m: partial_trace(m, (self.d_in, self.d_out), keep=1), dim, self.d_out)
        self._pt = linear_map_matrix(lambda m: partial_transpose(m, (self.d_in, self.d_out)), dim, dim)

    def add_choi_cone(self, builder: ProgramBuilder, name: str) -> Tuple[Variable, Variable]:
        dim = self.d_in * self.d_out
        j = builder.add_variable(name, self.choi_dim, PsdCone(dim))
        t = builder.add_variable(f"{name} scale", 1)
        builder.add_equality({j: self._tr_out, t: -self._identity_in.reshape(-1, 1)},
                             np.zeros(self.d_in ** 2), f"{name} trace preserving")
        if self._zero_rows.shape[0]:
            builder.add_equality({j: self._zero_rows}, np.zeros(self._zero_rows.shape[0]),
                                 f"{name} support")
        if self.unital:
            identity_out = herm_to_vec(np.eye(self.d_out)).reshape(-1, 1)
            builder.add_equality({j: self._tr_in, t: -identity_out},
                                 np.zeros(self.d_out ** 2), f"{name} unital")
        if self.ppt:
            builder.add_conic({j: self._pt}, PsdCone(dim), f"{name} ppt")
        return j, t

    def contains_choi(self, j: np.ndarray, tol: float = 1e-8) -> bool:
        j = as_vector(j, self.choi_dim, "Choi matrix")
        scale = max(1.0, float(np.linalg.norm(j)))
        m = vec_to_herm(j)
        if np.linalg.eigvalsh(m)[0] < -tol * scale or not self._trace_preserving(j, tol):
            return False
        if self._zero_rows.shape[0] and np.max(np.abs(self._zero_rows @ j)) > tol * scale:
            return False
        if self.unital and np.max(np.abs(self._tr_in @ j - herm_to_vec(np.eye(self.d_out)))) > tol * scale:
            return False
        if self.ppt and np.linalg.eigvalsh(vec_to_herm(self._pt @ j))[0] < -tol * scale:
            return False
        return True

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": "choi",
            "diagonal": self.diagonal,
            "ppt": self.ppt,
            "unital": self.unital,
            "incoherent": self.incoherent
        }


def maximally_incoherent_operations(model: GptModel) -> ChoiConeChannels:
    """Channels mapping incoherent states to incoherent states."""
    return ChoiConeChannels(model, model, incoherent=True)


def _unwrap(data: Any, key: str, what: str) -> Dict[str, Any]:
    if isinstance(data, dict) and key in data and "kind" not in data:
        data = data[key]
    if not isinstance(data, dict):
        raise ModelError(f"{what} description must be an object")
    return data


def free_set_from_json(model: GptModel, data: Dict[str, Any]) -> FreeStateSet:
    """
    Build a free state set from its JSON form.

    Kinds: "generators" (list of state vectors), "spectrahedral" (matrix,
    rhs and optional cone), "uniform", "diagonal" and "interval" (lo, hi).
    An enclosing {"free": {...}} wrapper is accepted.

    Raises:
        ModelError: Unknown kind or missing/invalid fields
    """
    data = _unwrap(data, "free", "free set")
    kind = data.get("kind")
    try:
        if kind == "generators":
            return GeneratorFreeSet(model, data["generators"], data.get("name", "free states"))
        if kind == "spectrahedral":
            cone = cone_from_json(data["cone"]) if "cone" in data else None
            return SpectrahedralFreeSet(model, data["matrix"], data["rhs"], cone, data.get("name", "free states"))
        if kind == "uniform":
            return uniform_point(model)
        if kind == "diagonal":
            return diagonal_states(model)
        if kind == "interval":
            return interval_set(model, float(data["lo"]), float(data["hi"]))
    except KeyError as exc:
        raise ModelError(f"free set description is missing field {exc}") from exc
    except ModelError:
        raise
    except (TypeError, ValueError, UnsupportedOperation) as exc:
        raise ModelError(f"invalid free set: {exc}") from exc
    raise ModelError(f"unknown free set kind {kind!r}")


def free_effects_from_json(model: GptModel, data: Dict[str, Any]) -> FreeEffectCone:
    """
    Build a free effect cone from {"kind": "generators" | "all" | "trivial" |
    "diagonal" | "measurements", ...}.

    Raises:
        ModelError: Unknown kind or missing/invalid fields
    """
    data = _unwrap(data, "free_effects", "free effects")
    kind = data.get("kind")
    try:
        if kind == "generators":
            return FreeEffectCone(model, GeneratedCone(data["generators"], warn_degenerate=False),
                                  data.get("name", "free effects"))
        if kind == "all":
            return all_effects(model)
        if kind == "trivial":
            return trivial_effects(model)
        if kind == "diagonal":
            return diagonal_effects(model)
        if kind == "measurements":
            return effects_from_measurements(model, [Measurement(model, m) for m in data["measurements"]])
    except KeyError as exc:
        raise ModelError(f"free effects description is missing field {exc}") from exc
    except ModelError:
        raise
    except (TypeError, ValueError, UnsupportedOperation) as exc:
        raise ModelError(f"invalid free effects: {exc}") from exc
    raise ModelError(f"unknown free effects kind {kind!r}")


def free_channels_from_json(model_in: GptModel, model_out: GptModel, data: Dict[str, Any]) -> FreeChannelSet:
    """
    Build a free channel set from {"kind": "replacer" | "choi" | "incoherent", ...};
    "choi" takes the boolean flags diagonal, ppt, unital and incoherent.

    Raises:
        ModelError: Unknown kind or invalid flags
    """
    data = _unwrap(data, "free_channels", "free channels")
    kind = data.get("kind")
    try:
        if kind == "replacer":
            return ReplacerChannels(model_in, model_out)
        if kind == "choi":
            flags = {f: bool(data.get(f, False)) for f in ("diagonal", "ppt", "unital", "incoherent")}
            return ChoiConeChannels(model_in, model_out, **flags)
        if kind == "incoherent":
            return ChoiConeChannels(model_in, model_out, incoherent=True)
    except ModelError:
        raise
    except (TypeError, ValueError, UnsupportedOperation) as exc:
        raise ModelError(f"invalid free channels: {exc}") from exc
    raise ModelError(f"unknown free channels kind {kind!r}")
