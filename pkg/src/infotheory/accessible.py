"""
Min-accessible information of state ensembles and the gain a measurement
gives over free measurements when used as a measure-and-prepare channel.

    I_acc(A) = -log2 max_x p_x + log2 max_N sum_y max_x p_x <N_y, s_x>

The inner maximum is the optimal guessing probability: one effect per x
suffices, so it is the state discrimination program of the ensemble.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from src.core.types import ContractViolation
from src.discrimination.advantage import witness_ensemble
from src.discrimination.tasks import optimal_p_succ
from src.gpt.channels import measurement_channel, random_state
from src.gpt.model import GptModel
from src.gpt.norms import EffectConeFamily
from src.gpt.objects import Measurement, StateEnsemble, ensure_measurement
from src.robustness.free_sets import FreeEffectCone
from src.robustness.measurements import measurement_robustness
from src.robustness.result import RobustnessResult, json_witness
from src.solver.program import SolverSettings
from .entropy import JointDistribution, h_min, i_min

logger = logging.getLogger(__name__)

GAIN_TOL = 1e-5
BOUND_SLACK = 1e-6
ZERO_ROBUSTNESS = 1e-9


def guessing_probability(
    ensemble: StateEnsemble,
    restriction: Union[None, EffectConeFamily, Sequence[Measurement]] = None,
    settings: Optional[SolverSettings] = None
) -> float:
    """max_N sum_x p_x <N_x, s_x>; exact on classical models."""
    if ensemble.model.is_classical and restriction is None:
        return float(np.sum(np.max(np.array(ensemble.weighted()), axis=0)))
    value, _ = optimal_p_succ(ensemble.model, ensemble, restriction, settings)
    return value


def i_min_acc(
    ensemble: StateEnsemble,
    restriction: Union[None, EffectConeFamily, Sequence[Measurement]] = None,
    settings: Optional[SolverSettings] = None
) -> float:
    """
    Min-accessible information of an ensemble, in bits.

    Args:
        ensemble: The ensemble {p_x, s_x}
        restriction: Optional measurement family; free families are closed
            under classical post-processing, so guessing over them is the
            restricted optimum
        settings: Solver settings
    """
    return h_min(ensemble.probs) + math.log2(guessing_probability(ensemble, restriction, settings))


def i_min_measured(ensemble: StateEnsemble, measurement) -> float:
    """I_min(X:Y) for the outcomes Y of a fixed measurement."""
    m = ensure_measurement(ensemble.model, measurement)
    return i_min(JointDistribution.from_ensemble(ensemble.probs, ensemble.states, m.effects))


def processed_ensemble(ensemble: StateEnsemble, measurement: Measurement) -> StateEnsemble:
    """{p_x, L_M(s_x)} for the measure-and-prepare channel of M."""
    channel = measurement_channel(measurement)
    return StateEnsemble(channel.model_out, ensemble.probs, [channel(s) for s in ensemble.states], 1e-8)


@dataclass
class AccessibleAdvantage:
    """
    Attributes:
        gain: I_acc(A_M) - max over free M' of I_acc(A_M') at the witness ensemble
        predicted: log2(1 + R)
        certified: |gain - predicted| within tolerance
        robustness: The measurement robustness result
        ensemble: Witness ensemble A
        resource_value: I_acc of the ensemble processed by M
        free_value: Best I_acc over free measurements
    """
    gain: float
    predicted: float
    certified: bool
    robustness: RobustnessResult
    ensemble: StateEnsemble
    resource_value: float
    free_value: float
    details: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {
            "gain": float(self.gain),
            "predicted": float(self.predicted),
            "certified": self.certified,
            "resource_value": float(self.resource_value),
            "free_value": float(self.free_value),
            "robustness": self.robustness.to_json(),
            "ensemble": {
                "probs": self.ensemble.probs.tolist(),
                "states": [s.tolist() for s in self.ensemble.states]
            },
            "details": json_witness(self.details)
        }


def gain_at(
    free: FreeEffectCone,
    measurement: Measurement,
    ensemble: StateEnsemble,
    settings: Optional[SolverSettings] = None
) -> Dict[str, float]:
    """Both accessible informations and their difference on one ensemble."""
    resource = i_min_acc(processed_ensemble(ensemble, measurement))
    best_free = i_min_acc(ensemble, free, settings)
    return {"resource": resource, "free": best_free, "gain": resource - best_free}


def accessible_advantage(
    model: GptModel,
    free: FreeEffectCone,
    measurement,
    settings: Optional[SolverSettings] = None,
    tol: float = GAIN_TOL
) -> AccessibleAdvantage:
    """
    Accessible-information gain of a measurement over the free ones at the
    ensemble built from its robustness witness, checked against log2(1 + R).

    Raises:
        ContractViolation: If the free effect cone has no strictly positive
            measurement
    """
    m = ensure_measurement(model, measurement)
    rob = measurement_robustness(model, free, m, settings)
    predicted = math.log2(1.0 + rob.value)
    if rob.value <= ZERO_ROBUSTNESS:
        ensemble = StateEnsemble(model, [1.0], [model.reference_state()])
    else:
        ensemble = witness_ensemble(model, rob)
    values = gain_at(free, m, ensemble, settings)
    certified = abs(values["gain"] - predicted) <= tol
    if not certified:
        logger.warning("accessible gain %.9g differs from log2(1 + R) = %.9g", values["gain"], predicted)
    logger.info("accessible information gain %.9g bits (predicted %.9g)", values["gain"], predicted)
    return AccessibleAdvantage(values["gain"], predicted, certified, rob, ensemble,
                               values["resource"], values["free"])


@dataclass
class GainSweep:
    """
    Attributes:
        bound: log2(1 + R)
        max_gain: Largest gain over the sampled ensembles
        gains: One gain per ensemble
    """
    bound: float
    max_gain: float
    gains: List[float]

    @property
    def respects_bound(self) -> bool:
        return self.max_gain <= self.bound + BOUND_SLACK

    def to_json(self) -> Dict[str, Any]:
        return {"bound": self.bound, "max_gain": self.max_gain, "gains": self.gains,
                "respects_bound": self.respects_bound}


def sweep_accessible_gain(
    model: GptModel,
    free: FreeEffectCone,
    measurement,
    n_ensembles: int = 200,
    n_states: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    bound: Optional[float] = None,
    settings: Optional[SolverSettings] = None
) -> GainSweep:
    """Gains on random ensembles, which never exceed log2(1 + R)."""
    m = ensure_measurement(model, measurement)
    rng = rng if rng is not None else np.random.default_rng(1234)
    if bound is None:
        bound = math.log2(1.0 + measurement_robustness(model, free, m, settings).value)
    n_states = n_states or m.n_outcomes
    if n_states < 1:
        raise ContractViolation("ensembles need at least one state")
    gains = []
    for _ in range(n_ensembles):
        ensemble = StateEnsemble(model, rng.dirichlet(np.ones(n_states)),
                                 [random_state(model, rng) for _ in range(n_states)], 1e-8)
        gains.append(gain_at(free, m, ensemble, settings)["gain"])
    return GainSweep(bound, max(gains) if gains else -math.inf, gains)
