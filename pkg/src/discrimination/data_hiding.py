"""
Data hiding ratio of a restricted measurement family,

    max over x with <U, x> = 0 of |x|_base / |x|_family,

the largest factor by which restricting the measurements can shrink the
optimal binary discrimination gain. The ratio is not concave, so it is
estimated by alternating maximization from several starts and reported as a
lower bound.

One half-step fixes a functional E with |E|_order <= 1 and solves the gauge
program

    min l  s.t.  E + c U = P - N,  P + N = l U,  P, N in E_F

whose multiplier x of the first row satisfies <U, x> = 0, |x|_family <= 1
and <E, x> = l. The other half-step replaces E by the functional attaining
|x|_base.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from src.cones.hermitian import herm_to_vec, vec_to_herm
from src.cones.orthant import OrthantCone
from src.gpt.model import GptModel
from src.gpt.norms import (
    EffectConeFamily,
    base_norm,
    distinguishability_norm,
    is_informationally_complete,
    order_unit_norm
)
from src.gpt.objects import Measurement
from src.robustness.free_sets import effects_from_measurements
from src.robustness.result import json_number
from src.solver.builder import ProgramBuilder
from src.solver.program import SolveStatus, SolverSettings

logger = logging.getLogger(__name__)

ZERO = 1e-10


@dataclass
class DataHidingResult:
    """
    Attributes:
        value: Best ratio found (inf when some traceless direction is invisible
            to the family)
        direction: The traceless vector attaining it
        restarts: Number of starting points used
        lower_bound: Always True; the search is a heuristic
    """
    value: float
    direction: Optional[np.ndarray]
    restarts: int
    lower_bound: bool = True

    def to_json(self) -> Dict[str, Any]:
        return {
            "value": json_number(self.value),
            "direction": self.direction.tolist() if self.direction is not None else None,
            "restarts": self.restarts,
            "lower_bound": self.lower_bound
        }


def _as_cone_family(model: GptModel, family) -> EffectConeFamily:
    if isinstance(family, EffectConeFamily):
        return family
    # conic hull of the listed effects; contains the family
    return effects_from_measurements(model, list(family))


def _gauge_direction(
    model: GptModel,
    family: EffectConeFamily,
    e: np.ndarray,
    settings: Optional[SolverSettings]
):
    b = ProgramBuilder("family gauge")
    lam = b.add_variable("gauge", 1)
    shift = b.add_variable("unit shift", 1)
    p = b.add_variable("positive effect", model.dim, family.cone)
    n = b.add_variable("negative effect", model.dim, family.cone)
    u = model.unit_effect.reshape(-1, 1)
    b.add_equality({p: 1.0, n: -1.0, shift: -u}, e, "difference")
    b.add_equality({p: 1.0, n: 1.0, lam: -u}, np.zeros(model.dim), "sum")
    b.set_objective({lam: 1.0})
    result = b.solve(settings)
    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        return None, result.multiplier("difference")
    result.require("family gauge")
    return result.objective, result.multiplier("difference")


def _attaining_functional(model: GptModel, x: np.ndarray, settings: Optional[SolverSettings]) -> np.ndarray:
    """E with |E|_order <= 1 and <E, x> = |x|_base."""
    if isinstance(model.state_cone, OrthantCone):
        return np.sign(x) * model.unit_effect
    if model.is_quantum:
        vals, vecs = np.linalg.eigh(vec_to_herm(x))
        return herm_to_vec((vecs * np.sign(vals)) @ vecs.conj().T)
    b = ProgramBuilder("attaining functional")
    p = b.add_variable("positive effect", model.dim)
    n = b.add_variable("negative effect", model.dim)
    b.add_dual_conic({p: 1.0}, model.state_cone, "positive effect in dual")
    b.add_dual_conic({n: 1.0}, model.state_cone, "negative effect in dual")
    b.add_equality({p: 1.0, n: 1.0}, model.unit_effect, "completeness")
    b.set_objective({p: x, n: -x}, maximize=True)
    result = b.solve(settings).require("attaining functional")
    return result.value(p) - result.value(n)


def _traceless(model: GptModel, x: np.ndarray) -> np.ndarray:
    u = model.unit_effect
    return x - (u @ x) / (u @ u) * u


def data_hiding_ratio(
    model: GptModel,
    family: Union[EffectConeFamily, Sequence[Measurement]],
    restarts: int = 8,
    max_rounds: int = 30,
    rng: Optional[np.random.Generator] = None,
    settings: Optional[SolverSettings] = None
) -> DataHidingResult:
    """
    Lower bound on the data hiding ratio of a measurement family.

    Args:
        model: The model
        family: Effect-cone family or explicit measurement list (replaced by
            the conic hull of its effects)
        restarts: Random starting functionals
        max_rounds: Alternations per start
        rng: Generator for the starting functionals
        settings: Solver settings

    Returns:
        DataHidingResult with lower_bound=True
    """
    family = _as_cone_family(model, family)
    if not is_informationally_complete(model, family):
        logger.warning("data hiding ratio of a family that is not informationally complete")
    rng = rng if rng is not None else np.random.default_rng(1234)
    best_value, best_x = 1.0, None

    for start in range(restarts):
        y = rng.standard_normal(model.dim)
        e = y / order_unit_norm(model, y)
        last = -math.inf
        for _ in range(max_rounds):
            gauge, x = _gauge_direction(model, family, e, settings)
            if gauge is None:
                # E has a component no free measurement sees
                logger.info("data hiding ratio unbounded: direction invisible to %s", family.name)
                x = _traceless(model, x)
                return DataHidingResult(math.inf, x, start + 1)
            x = _traceless(model, x)
            restricted = distinguishability_norm(model, family, x, settings=settings)
            if restricted <= ZERO * max(1.0, float(np.linalg.norm(x))):
                if float(np.linalg.norm(x)) > ZERO:
                    return DataHidingResult(math.inf, x, start + 1)
                break
            value = base_norm(model, x) / restricted
            if value > best_value:
                best_value, best_x = value, x
            if value <= last + 1e-9:
                break
            last = value
            e = _attaining_functional(model, x, settings)

    logger.info("data hiding ratio lower bound %.9g over %d starts", best_value, restarts)
    return DataHidingResult(best_value, best_x, restarts)
