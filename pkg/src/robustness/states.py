"""
Robustness of states: generalized robustness, standard robustness and the
free-set base norm.

Generalized:  min <U, t> - 1   s.t.  t - w in C,  t in cone(F)
Standard:     min <U, p>       s.t.  s - p = w,   s, p in cone(F)
"""

import logging
import math
from typing import Optional

import numpy as np

from src.core.types import InternalError
from src.gpt.model import GptModel
from src.gpt.objects import State
from src.solver.builder import BuiltSolution, ProgramBuilder
from src.solver.certify import certify
from src.solver.program import SolveStatus, SolverSettings
from .free_sets import FreeStateSet
from .result import RobustnessResult

logger = logging.getLogger(__name__)

SPAN_TOL = 1e-9


def certificate_of(result: BuiltSolution, slater: bool = False):
    """Certificate of a builder solve (no Slater search by default)."""
    return certify(result.program, result.solution, check_slater=slater)


def generalized_robustness_state(
    model: GptModel,
    free: FreeStateSet,
    state,
    settings: Optional[SolverSettings] = None,
    slater: bool = False
) -> RobustnessResult:
    """
    Generalized robustness R_F(w) = min { r : w <= (1 + r) s, s in F }.

    The witness X is the multiplier of t - w in C: X in C*, <X, s> <= 1 on F
    and <X, w> = 1 + r.

    Args:
        model: The model
        free: Free states F
        state: The state w
        settings: Solver settings
        slater: Include the Slater search in the certificate

    Returns:
        RobustnessResult with witness X, or value inf with the Farkas ray
        when no s in F dominates w

    Raises:
        InternalError: If the program is infeasible although F has an
            interior point
        SolverFailure: On numerical breakdown
    """
    w = State(model, state).vector
    b = ProgramBuilder("generalized robustness")
    tau = free.add_cone_variable(b, "scaled free state")
    b.add_conic({tau: 1.0}, model.state_cone, "domination", constant=-w)
    b.set_objective({tau: model.unit_effect}, constant=-1.0)
    result = b.solve(settings)

    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        if free.interior:
            raise InternalError("generalized robustness infeasible although F has an interior point")
        logger.info("generalized robustness diverges: no free state dominates the input")
        return RobustnessResult("generalized", math.inf, infeasibility=result.solution.z_dual)
    result.require("generalized robustness")
    value = max(0.0, result.objective)
    witness = result.multiplier("domination")
    logger.info("generalized robustness %.9g (gap %.2e)", value, result.solution.gap)
    return RobustnessResult(
        "generalized",
        value,
        witness=witness,
        certificate=certificate_of(result, slater),
        gap=abs(result.objective - result.dual_objective),
        details={"free_state": result.value(tau) / max(1.0 + value, 1e-300)}
    )


def _span_residual(model: GptModel, free: FreeStateSet, x: np.ndarray) -> np.ndarray:
    """Component of x orthogonal to span F."""
    basis = free.span_basis()
    coef, *_ = np.linalg.lstsq(basis, x, rcond=None)
    return x - basis @ coef


def divergence_witness(model: GptModel, free: FreeStateSet, x: np.ndarray) -> Optional[np.ndarray]:
    """
    A functional z with <z, s> = 0 on F and <z, x> = 1, or None when x lies
    in the span of F.
    """
    r = _span_residual(model, free, x)
    norm2 = float(r @ r)
    if np.sqrt(norm2) <= SPAN_TOL * max(1.0, float(np.linalg.norm(x))):
        return None
    return r / norm2


def standard_robustness_state(
    model: GptModel,
    free: FreeStateSet,
    state,
    settings: Optional[SolverSettings] = None,
    slater: bool = False,
    cross_check: bool = True
) -> RobustnessResult:
    """
    Standard robustness R^F_F(w) = inf { r : (w + r p) / (1 + r) in F, p in F }.

    The witness X' = 2Z + U, Z the multiplier of s - p = w, satisfies
    -1 <= <X', s> <= 1 on F and <X', w> = 1 + 2r. With cross_check the
    free-set base norm is recomputed and stored under details["base_norm"].

    Returns:
        RobustnessResult; value inf with a functional vanishing on F (the
        divergence certificate) when w is outside span F
    """
    w = State(model, state).vector
    z = divergence_witness(model, free, w)
    if z is not None:
        logger.info("standard robustness diverges: state outside span F")
        return RobustnessResult("standard", math.inf, witness=z, infeasibility=z,
                                details={"divergent": True})

    b = ProgramBuilder("standard robustness")
    sig = free.add_cone_variable(b, "scaled mixture")
    pi = free.add_cone_variable(b, "scaled free noise")
    b.add_equality({sig: 1.0, pi: -1.0}, w, "decomposition")
    b.set_objective({pi: model.unit_effect})
    result = b.solve(settings)
    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        ray = result.solution.z_dual
        return RobustnessResult("standard", math.inf, witness=ray, infeasibility=ray,
                                details={"divergent": True})
    result.require("standard robustness")
    value = max(0.0, result.objective)
    zmul = result.multiplier("decomposition")
    witness = 2.0 * zmul + model.unit_effect
    details = {"divergent": False}
    if cross_check:
        details["base_norm"] = free_base_norm(model, free, w, settings)
        if abs(details["base_norm"] - (1.0 + 2.0 * value)) > 1e-5 * (1.0 + value):
            logger.warning(
                "base-norm identity off: 1 + 2R = %.9g, free base norm %.9g",
                1.0 + 2.0 * value, details["base_norm"]
            )
    logger.info("standard robustness %.9g", value)
    return RobustnessResult(
        "standard",
        value,
        witness=witness,
        certificate=certificate_of(result, slater),
        gap=abs(result.objective - result.dual_objective),
        details=details
    )


def free_base_norm(
    model: GptModel,
    free: FreeStateSet,
    x,
    settings: Optional[SolverSettings] = None
) -> float:
    """
    min { l+ + l- : x = l+ s+ - l- s-, s+- in F }, inf outside span F.
    """
    x = model.check(x)
    if divergence_witness(model, free, x) is not None:
        return math.inf
    b = ProgramBuilder("free base norm")
    a = free.add_cone_variable(b, "positive part")
    c = free.add_cone_variable(b, "negative part")
    b.add_equality({a: 1.0, c: -1.0}, x, "decomposition")
    b.set_objective({a: model.unit_effect, c: model.unit_effect})
    result = b.solve(settings)
    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        return math.inf
    return result.require("free base norm").objective
