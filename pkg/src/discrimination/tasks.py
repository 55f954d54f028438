"""
Discrimination tasks and their success probabilities.

A task reduces to a list of unnormalized branch vectors b_i (p_i w_i for
state ensembles, p_i L_i(w) for channel ensembles, P_i(w) for
subchannels), and

    p_succ = sum_i <M_i, b_i>

over the conclusive outcomes. With inconclusive=True the measurement has
one extra effect which never scores.
"""

import logging
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.types import ContractViolation, SOLVER_OBJECT_TOL, UnsupportedOperation
from src.gpt.channels import apply_id_tensor
from src.gpt.model import GptModel, quantum_model
from src.gpt.norms import EffectConeFamily, base_norm
from src.gpt.objects import Channel, Measurement, State, StateEnsemble, Subchannel, ensure_measurement
from src.solver.builder import ProgramBuilder
from src.solver.program import SolverSettings

logger = logging.getLogger(__name__)

HELSTROM_TOL = 1e-6


class ChannelEnsemble:
    """
    Probabilities with channels sharing input and output models.

    Attributes:
        probs: Probability vector (zero entries allowed)
        channels: The channels
        model_in: Common input model
        model_out: Common output model
    """

    def __init__(self, probs: Sequence[float], channels: Sequence[Channel]):
        p = np.asarray(probs, dtype=float)
        if len(channels) == 0 or p.shape != (len(channels),):
            raise ContractViolation(f"{p.size} probabilities for {len(channels)} channels")
        if np.min(p) < -1e-12 or abs(float(np.sum(p)) - 1.0) > 1e-9:
            raise ContractViolation("ensemble probabilities must be nonnegative and sum to 1")
        first = channels[0]
        for ch in channels[1:]:
            if ch.model_in != first.model_in or ch.model_out != first.model_out:
                raise ContractViolation("channels of an ensemble must share input and output models")
        self.probs = np.maximum(p, 0.0)
        self.channels = list(channels)
        self.model_in = first.model_in
        self.model_out = first.model_out

    def __len__(self) -> int:
        return len(self.channels)

    def __repr__(self) -> str:
        return f"ChannelEnsemble({len(self)} channels)"


class DiscriminationTask(ABC):
    """
    A discrimination task with its measurement.

    Attributes:
        measurement: Measurement on the output model
        inconclusive: Whether the last outcome is the inconclusive one
    """

    def __init__(self, measurement: Measurement, inconclusive: bool):
        self.measurement = measurement
        self.inconclusive = inconclusive
        expected = self.n_hypotheses + (1 if inconclusive else 0)
        if measurement.n_outcomes != expected:
            raise ContractViolation(
                f"measurement has {measurement.n_outcomes} outcomes, task needs {expected}"
            )

    @property
    @abstractmethod
    def n_hypotheses(self) -> int:
        pass

    @property
    @abstractmethod
    def output_model(self) -> GptModel:
        pass

    @abstractmethod
    def branches(self) -> List[np.ndarray]:
        """Unnormalized output vectors, one per hypothesis."""
        pass

    @property
    @abstractmethod
    def variant(self) -> str:
        pass

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "inconclusive": self.inconclusive,
            "measurement": [e.tolist() for e in self.measurement.effects]
        }


class StateTask(DiscriminationTask):
    """Discriminate the states of an ensemble."""

    def __init__(self, ensemble: StateEnsemble, measurement, inconclusive: bool = False):
        self.ensemble = ensemble
        super().__init__(ensure_measurement(ensemble.model, measurement), inconclusive)

    @property
    def n_hypotheses(self) -> int:
        return len(self.ensemble)

    @property
    def output_model(self) -> GptModel:
        return self.ensemble.model

    @property
    def variant(self) -> str:
        return "state"

    def branches(self) -> List[np.ndarray]:
        return self.ensemble.weighted()

    def to_json(self) -> dict:
        out = super().to_json()
        out["probs"] = self.ensemble.probs.tolist()
        out["states"] = [s.tolist() for s in self.ensemble.states]
        return out


class ChannelTask(DiscriminationTask):
    """
    Discriminate the channels of an ensemble applied to a fixed input.

    With ancilla > 1 (quantum only) the input lives on the ancilla times the
    channel input and each channel acts as id (x) L.
    """

    def __init__(
        self,
        ensemble: ChannelEnsemble,
        input_state,
        measurement,
        inconclusive: bool = False,
        ancilla: int = 1
    ):
        self.ensemble = ensemble
        self.ancilla = ancilla
        if ancilla > 1:
            if not (ensemble.model_in.is_quantum and ensemble.model_out.is_quantum):
                raise UnsupportedOperation("ancilla-assisted tasks need quantum models")
            self.input_model = quantum_model(ancilla * ensemble.model_in.size)
            self._output_model = quantum_model(ancilla * ensemble.model_out.size)
        else:
            self.input_model = ensemble.model_in
            self._output_model = ensemble.model_out
        self.input_state = State(self.input_model, input_state, SOLVER_OBJECT_TOL).vector
        super().__init__(ensure_measurement(self._output_model, measurement), inconclusive)

    @property
    def n_hypotheses(self) -> int:
        return len(self.ensemble)

    @property
    def output_model(self) -> GptModel:
        return self._output_model

    @property
    def variant(self) -> str:
        return "channel"

    def apply(self, channel: Channel, x: np.ndarray) -> np.ndarray:
        if self.ancilla > 1:
            return apply_id_tensor(channel, x, self.ancilla)
        return channel(x)

    def branches(self) -> List[np.ndarray]:
        return [p * self.apply(ch, self.input_state)
                for p, ch in zip(self.ensemble.probs, self.ensemble.channels)]

    def score_functional(self) -> np.ndarray:
        """y with p_succ = <y, w> when the input is replaced by w."""
        if self.ancilla > 1:
            raise UnsupportedOperation("score functional of an ancilla-assisted task")
        return sum(p * ch.dual(e) for p, ch, e in
                   zip(self.ensemble.probs, self.ensemble.channels, self.measurement.effects))

    def to_json(self) -> dict:
        out = super().to_json()
        out["probs"] = self.ensemble.probs.tolist()
        out["input_state"] = self.input_state.tolist()
        out["ancilla"] = self.ancilla
        return out


class SubchannelTask(DiscriminationTask):
    """
    Identify which subchannel of an instrument {P_i} fired; sum_i P_i must be
    a channel.
    """

    def __init__(
        self,
        subchannels: Sequence[Subchannel],
        input_state,
        measurement,
        inconclusive: bool = False,
        tol: float = 1e-9
    ):
        if len(subchannels) == 0:
            raise ContractViolation("an instrument needs at least one subchannel")
        first = subchannels[0]
        for s in subchannels:
            if s.model_in != first.model_in or s.model_out != first.model_out:
                raise ContractViolation("subchannels must share input and output models")
        total = sum(s.matrix for s in subchannels)
        defect = first.model_out.unit_effect @ total - first.model_in.unit_effect
        if float(np.max(np.abs(defect))) > tol * max(1.0, float(np.linalg.norm(first.model_in.unit_effect))):
            raise ContractViolation("subchannels do not sum to a normalization-preserving map")
        self.subchannels = list(subchannels)
        self.input_state = State(first.model_in, input_state, SOLVER_OBJECT_TOL).vector
        super().__init__(ensure_measurement(first.model_out, measurement), inconclusive)

    @property
    def n_hypotheses(self) -> int:
        return len(self.subchannels)

    @property
    def output_model(self) -> GptModel:
        return self.subchannels[0].model_out

    @property
    def variant(self) -> str:
        return "subchannel"

    def branches(self) -> List[np.ndarray]:
        return [s(self.input_state) for s in self.subchannels]

    def score_functional(self) -> np.ndarray:
        """y with p_succ = <y, w> when the input is replaced by w."""
        return sum(s.dual(e) for s, e in zip(self.subchannels, self.measurement.effects))


def p_succ(task: DiscriminationTask) -> float:
    """Success probability of a task; the inconclusive outcome never scores."""
    effects = task.measurement.effects
    return float(sum(e @ b for e, b in zip(effects, task.branches())))


def _effect_variables(builder: ProgramBuilder, model: GptModel, n: int, family: Optional[EffectConeFamily]):
    effects = []
    for i in range(n):
        if family is None:
            e = builder.add_variable(f"effect {i}", model.dim)
            builder.add_dual_conic({e: 1.0}, model.state_cone, f"effect {i} positive")
        else:
            e = builder.add_variable(f"effect {i}", model.dim, family.cone)
        effects.append(e)
    builder.add_equality({e: 1.0 for e in effects}, model.unit_effect, "completeness")
    return effects


def _best_post_processing(measurements: Sequence[Measurement], weighted: List[np.ndarray]) -> Tuple[float, Measurement]:
    """Best guessing rule on top of each listed measurement."""
    best_value, best = -np.inf, None
    for m in measurements:
        scores = m.matrix() @ np.array(weighted).T
        guesses = np.argmax(scores, axis=1)
        value = float(np.sum(np.max(scores, axis=1)))
        if value > best_value + 1e-12:
            effects = [np.zeros_like(weighted[0]) for _ in weighted]
            for a, g in enumerate(guesses):
                effects[g] = effects[g] + m.effects[a]
            best_value, best = value, Measurement(m.model, effects)
    return best_value, best


def optimal_p_succ(
    model: GptModel,
    ensemble: StateEnsemble,
    restriction: Union[None, EffectConeFamily, Sequence[Measurement]] = None,
    settings: Optional[SolverSettings] = None
) -> Tuple[float, Measurement]:
    """
    Best success probability over all (or restricted) measurements.

    Args:
        model: The model
        ensemble: The state ensemble
        restriction: None for all measurements, an effect-cone family, or an
            explicit list of measurements (combined with the best guessing rule)
        settings: Solver settings

    Returns:
        Tuple (value, optimal measurement)
    """
    weighted = ensemble.weighted()
    n = len(weighted)
    if n == 1 and restriction is None:
        return 1.0, Measurement(model, [model.unit_effect])
    if restriction is not None and not isinstance(restriction, EffectConeFamily):
        measurements = list(restriction)
        if not measurements:
            raise ContractViolation("measurement family is empty")
        return _best_post_processing(measurements, weighted)

    b = ProgramBuilder("optimal discrimination")
    effects = _effect_variables(b, model, n, restriction)
    b.set_objective({e: w for e, w in zip(effects, weighted)}, maximize=True)
    result = b.solve(settings).require("optimal discrimination")
    value = result.objective
    measurement = Measurement.repair(model, [result.value(e) for e in effects], tol=SOLVER_OBJECT_TOL)

    if n == 2 and restriction is None:
        helstrom = 0.5 * (1.0 + base_norm(model, weighted[0] - weighted[1]))
        if abs(helstrom - value) > HELSTROM_TOL:
            logger.warning("binary optimum %.9g differs from the base-norm value %.9g", value, helstrom)
    logger.info("optimal success probability %.9g over %d states", value, n)
    return value, measurement
