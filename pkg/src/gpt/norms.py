"""
Base norm, order-unit norm and distinguishability norm.

The default method evaluates closed forms where they exist (trace norm and
operator norm on the quantum backend, weighted l1 and max on orthants,
vertex enumeration on generated cones). method="conic" always solves the
defining conic program.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from src.core.types import AbstractCone, ContractViolation, DEFAULT_TOL
from src.cones.generated import GeneratedCone
from src.cones.hermitian import vec_to_herm
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone
from src.solver.builder import ProgramBuilder
from src.solver.program import SolverSettings
from .model import GptModel
from .objects import Measurement

logger = logging.getLogger(__name__)

METHODS = ("auto", "conic")


class EffectConeFamily:
    """
    The measurements whose effects all lie in a cone E_F inside C*.

    Attributes:
        model: The model
        cone: The cone E_F (coordinates of functionals)
        name: Label used in reports
    """

    def __init__(self, model: GptModel, cone: AbstractCone, name: str = "effect cone"):
        if cone.ambient_dim != model.dim:
            raise ContractViolation(
                f"effect cone has dimension {cone.ambient_dim}, model has {model.dim}"
            )
        self.model = model
        self.cone = cone
        self.name = name
        self._check_inside_dual()

    def _check_inside_dual(self) -> None:
        cone = self.cone
        state_cone = self.model.state_cone
        if isinstance(cone, GeneratedCone):
            for k in range(cone.n_generators):
                if not state_cone.dual_member(cone.generators[:, k], DEFAULT_TOL):
                    raise ContractViolation(f"free effect generator {k} is not in the dual cone")
        elif type(cone) is not type(state_cone) or cone.ambient_dim != state_cone.ambient_dim:
            raise ContractViolation("free effect cone must be generated or equal to the dual cone")

    @property
    def is_full(self) -> bool:
        """Whether E_F is the whole dual cone."""
        return not isinstance(self.cone, GeneratedCone) and self.model.state_cone.is_self_dual

    @property
    def informationally_complete(self) -> bool:
        if isinstance(self.cone, GeneratedCone):
            return bool(np.linalg.matrix_rank(self.cone.generators) == self.model.dim)
        return True

    def contains(self, e: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
        return self.cone.member(self.model.check(e, "effect"), tol)

    def __repr__(self) -> str:
        return f"EffectConeFamily({self.name})"


MeasurementFamily = Union[EffectConeFamily, Sequence[Measurement]]


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ContractViolation(f"unknown method {method!r}, expected one of {METHODS}")


def base_norm(
    model: GptModel,
    x,
    method: str = "auto",
    settings: Optional[SolverSettings] = None
) -> float:
    """
    min { l+ + l- : x = l+ w+ - l- w-, w+- states }.

    Args:
        model: The model
        x: Vector of the model's space
        method: "auto" (closed forms when available) or "conic"
        settings: Solver settings for the conic route

    Returns:
        The base norm of x
    """
    _check_method(method)
    x = model.check(x)
    cone = model.state_cone
    u = model.unit_effect
    if method == "auto":
        if isinstance(cone, OrthantCone):
            return float(np.abs(x) @ u)
        if model.is_quantum:
            return float(np.sum(np.abs(np.linalg.eigvalsh(vec_to_herm(x)))))
    b = ProgramBuilder("base norm")
    pos = b.add_variable("positive part", model.dim, cone)
    neg = b.add_variable("negative part", model.dim, cone)
    b.add_equality({pos: 1.0, neg: -1.0}, x, "decomposition")
    b.set_objective({pos: u, neg: u})
    return b.solve(settings).require("base norm").objective


def order_unit_norm(
    model: GptModel,
    y,
    method: str = "auto",
    settings: Optional[SolverSettings] = None
) -> float:
    """
    max { |<y, w>| : w a state }.

    Args:
        model: The model
        y: Functional
        method: "auto" (exact support function) or "conic" (two programs)
        settings: Solver settings for the conic route
    """
    _check_method(method)
    y = model.check(y, "functional")
    if method == "auto":
        return max(model.support(y), model.support(-y))
    return max(abs(_conic_support(model, y, settings)), abs(_conic_support(model, -y, settings)))


def _conic_support(model: GptModel, y: np.ndarray, settings: Optional[SolverSettings]) -> float:
    b = ProgramBuilder("support")
    w = b.add_variable("state", model.dim, model.state_cone)
    b.add_equality({w: model.unit_effect}, 1.0, "normalization")
    b.set_objective({w: y}, maximize=True)
    return b.solve(settings).require("support function").objective


def support_conic(model: GptModel, y, settings: Optional[SolverSettings] = None) -> float:
    """max <y, w> over states, as a conic program."""
    return _conic_support(model, model.check(y, "functional"), settings)


def family_span_rank(model: GptModel, family: MeasurementFamily) -> int:
    if isinstance(family, EffectConeFamily):
        if isinstance(family.cone, GeneratedCone):
            return int(np.linalg.matrix_rank(family.cone.generators))
        return model.dim
    effects = np.array([e for m in family for e in m.effects])
    return int(np.linalg.matrix_rank(effects))


def is_informationally_complete(model: GptModel, family: MeasurementFamily) -> bool:
    return family_span_rank(model, family) == model.dim


def distinguishability_norm(
    model: GptModel,
    family: MeasurementFamily,
    x,
    method: str = "auto",
    settings: Optional[SolverSettings] = None
) -> float:
    """
    sup over measurements of the family of sum_i |<M_i, x>|.

    For a cone family the supremum is attained by two-outcome measurements
    {P, N} with P + N = U, P, N in E_F, so it is the conic program
    max <P - N, x>. For an explicit list the maximum is taken exactly.

    Raises:
        ContractViolation: Empty family
    """
    _check_method(method)
    x = model.check(x)
    if not isinstance(family, EffectConeFamily):
        family = list(family)
        if not family:
            raise ContractViolation("measurement family is empty")
    if not is_informationally_complete(model, family):
        logger.warning("measurement family is not informationally complete")
    if not isinstance(family, EffectConeFamily):
        return max(float(np.sum(np.abs(m.matrix() @ x))) for m in family)
    if method == "auto" and family.is_full:
        return base_norm(model, x)
    b = ProgramBuilder("distinguishability norm")
    p = b.add_variable("positive effect", model.dim, family.cone)
    n = b.add_variable("negative effect", model.dim, family.cone)
    b.add_equality({p: 1.0, n: 1.0}, model.unit_effect, "completeness")
    b.set_objective({p: x, n: -x}, maximize=True)
    return b.solve(settings).require("distinguishability norm").objective
