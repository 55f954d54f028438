"""
Robustness of measurements against a free effect cone.

    min r  s.t.  N~_i in C*,  M_i + N~_i in E_F,  sum_i N~_i = r U

with N~_i = r N_i. The witness is ({w_i}, eta): w_i in C the multiplier of
N~_i in C*, eta = -Z for the normalization row, so that <U, eta> = 1,
<F, w_i> <= <F, eta> on E_F and sum_i <M_i, w_i> = 1 + r.
"""

import logging
from typing import Optional

from src.core.types import ContractViolation
from src.gpt.model import GptModel
from src.gpt.objects import ensure_measurement
from src.solver.builder import ProgramBuilder
from src.solver.program import SolverSettings
from .free_sets import FreeEffectCone
from .result import RobustnessResult
from .states import certificate_of

logger = logging.getLogger(__name__)


def measurement_robustness(
    model: GptModel,
    free: FreeEffectCone,
    measurement,
    settings: Optional[SolverSettings] = None,
    slater: bool = False
) -> RobustnessResult:
    """
    Robustness of a measurement: min { r : M_i + r N_i in E_F, {N_i} a measurement }.

    Args:
        model: The model
        free: Free effect cone with a strictly positive measurement
        measurement: Measurement or list of effects
        settings: Solver settings
        slater: Include the Slater search in the certificate

    Returns:
        RobustnessResult with witness [w_0, ..., w_{n-1}] and details["eta"]

    Raises:
        ContractViolation: If E_F contains no strictly positive measurement
    """
    if not free.strictly_positive:
        raise ContractViolation(
            "measurement robustness needs a free measurement of strictly positive effects"
        )
    m = ensure_measurement(model, measurement)
    b = ProgramBuilder("measurement robustness")
    r = b.add_variable("robustness", 1)
    noise = [b.add_variable(f"noise {i}", model.dim) for i in range(m.n_outcomes)]
    for i, (n_i, e_i) in enumerate(zip(noise, m.effects)):
        b.add_dual_conic({n_i: 1.0}, model.state_cone, f"noise {i} positive")
        b.add_conic({n_i: 1.0}, free.cone, f"mixture {i} free", constant=e_i)
    terms = {n_i: 1.0 for n_i in noise}
    terms[r] = -model.unit_effect.reshape(-1, 1)
    b.add_equality(terms, 0.0 * model.unit_effect, "normalization")
    b.set_objective({r: 1.0})
    result = b.solve(settings).require("measurement robustness")

    value = max(0.0, result.objective)
    omegas = [result.multiplier(f"noise {i} positive") for i in range(m.n_outcomes)]
    eta = -result.multiplier("normalization")
    logger.info("measurement robustness %.9g over %d outcomes", value, m.n_outcomes)
    return RobustnessResult(
        "measurement",
        value,
        witness=omegas,
        certificate=certificate_of(result, slater),
        gap=abs(result.objective - result.dual_objective),
        details={"eta": eta}
    )
