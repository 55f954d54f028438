"""
Advantage ratios: from each robustness witness build the discrimination task
that achieves the ratio 1 + R (or 1 + 2R for the standard robustness), and
check the upper bound on random tasks.

Every advantage_ratio_* function returns an AdvantageReport holding the
constructed task, both success probabilities and the predicted value.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.types import ContractViolation, InternalError, SOLVER_OBJECT_TOL
from src.gpt.channels import (
    apply_id_tensor,
    max_entangled_state,
    measure_and_prepare,
    matrix_from_choi,
    random_channel,
    random_measurement,
    random_state,
    replacer_channel
)
from src.gpt.model import GptModel, quantum_model
from src.gpt.norms import EffectConeFamily, base_norm, distinguishability_norm, order_unit_norm
from src.gpt.objects import Channel, Measurement, StateEnsemble, Subchannel, clean_state, ensure_measurement
from src.robustness.channels import channel_robustness, ensemble_channel_robustness, generating_power
from src.robustness.free_sets import FreeChannelSet, FreeEffectCone, FreeStateSet
from src.robustness.measurements import measurement_robustness
from src.robustness.result import RobustnessResult, json_number, json_witness
from src.robustness.states import generalized_robustness_state, standard_robustness_state
from src.solver.program import SolverSettings
from .tasks import (
    ChannelEnsemble,
    ChannelTask,
    DiscriminationTask,
    StateTask,
    SubchannelTask,
    optimal_p_succ,
    p_succ
)

logger = logging.getLogger(__name__)

REPORT_TOL = 1e-5
ZERO = 1e-12
DIVERGENCE_TOL = 1e-9


def _ratio(numerator: float, denominator: float) -> float:
    if denominator <= ZERO:
        return math.inf if numerator > ZERO else 1.0
    return numerator / denominator


def _discrepancy(ratio: float, predicted: float) -> float:
    if math.isinf(ratio) or math.isinf(predicted):
        return 0.0 if ratio == predicted else math.inf
    return abs(ratio - predicted)


@dataclass
class AdvantageReport:
    """
    Achieved advantage ratio of a constructed task.

    Attributes:
        theorem: Which construction produced the report
        numerator: Success probability (or gain) with the resource
        denominator: Best success probability (or gain) over the free baseline
        ratio: numerator / denominator
        predicted: 1 + R (1 + 2R for standard robustness)
        discrepancy: |ratio - predicted|
        certified: Whether the ratio matches the prediction within tolerance
        task: The constructed task
        robustness: The robustness result whose witness built the task
        details: Extra report fields
    """
    theorem: str
    numerator: float
    denominator: float
    ratio: float
    predicted: float
    discrepancy: float
    certified: bool
    task: Optional[DiscriminationTask]
    robustness: RobustnessResult
    details: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        out = {
            "theorem": self.theorem,
            "numerator": json_number(self.numerator),
            "denominator": json_number(self.denominator),
            "ratio": json_number(self.ratio),
            "predicted": json_number(self.predicted),
            "discrepancy": json_number(self.discrepancy),
            "certified": self.certified,
            "task": self.task.to_json() if self.task is not None else None,
            "robustness": self.robustness.to_json()
        }
        if self.details:
            out["details"] = json_witness(self.details)
        return out


def _report(
    theorem: str,
    numerator: float,
    denominator: float,
    predicted: float,
    task: Optional[DiscriminationTask],
    robustness: RobustnessResult,
    tol: float,
    details: Optional[Dict[str, Any]] = None
) -> AdvantageReport:
    ratio = _ratio(numerator, denominator)
    discrepancy = _discrepancy(ratio, predicted)
    certified = discrepancy <= tol
    if certified:
        logger.info("%s: ratio %.9g matches %.9g", theorem, ratio, predicted)
    else:
        logger.warning("%s: ratio %.9g differs from predicted %.9g by %.3e", theorem, ratio, predicted, discrepancy)
    return AdvantageReport(theorem, numerator, denominator, ratio, predicted, discrepancy,
                           certified, task, robustness, details or {})


def _trivial(theorem: str, robustness: RobustnessResult, tol: float) -> AdvantageReport:
    logger.info("%s: witness vanishes, trivial ratio", theorem)
    return _report(theorem, 1.0, 1.0, 1.0 + robustness.value, None, robustness, tol, {"degenerate": True})


def _require_finite(result: RobustnessResult, what: str) -> None:
    if not result.finite:
        raise ContractViolation(f"{what} is infinite; no finite advantage ratio exists")


def _binary_witness_measurement(model: GptModel, x: np.ndarray) -> Tuple[float, Optional[Measurement]]:
    """{X / |X|, U - X / |X|} for a witness X in the dual cone."""
    norm = order_unit_norm(model, x)
    if norm <= ZERO:
        return norm, None
    e = x / norm
    return norm, Measurement(model, [e, model.unit_effect - e], SOLVER_OBJECT_TOL)


def _placeholder_channel(model: GptModel, free: FreeStateSet) -> Channel:
    """Constant channel onto the first free state; carries probability zero."""
    _, s = free.support(model.unit_effect)
    return replacer_channel(model, model, clean_state(model, s))


def _check_channel_family(
    model: GptModel,
    free: FreeStateSet,
    state,
    channel_family: Sequence[Tuple[ChannelEnsemble, Measurement]],
    bound: float,
    settings: Optional[SolverSettings],
    slack: float
) -> "SweepResult":
    """Ratio of every supplied (ensemble, measurement) task against the bound."""
    family = list(channel_family)
    if not family:
        raise ContractViolation("channel family is empty")
    pairs = []
    for ensemble, measurement in family:
        if ensemble.model_in != model or ensemble.model_out != model:
            raise ContractViolation("channel family must act on the state's model")
        task = ChannelTask(ensemble, state, measurement)
        pairs.append((p_succ(task), free.support(task.score_functional(), settings)[0]))
    return _sweep(bound, pairs, slack)


def _with_family(report: AdvantageReport, family: Optional["SweepResult"]) -> AdvantageReport:
    if family is None:
        return report
    report.details["channel_family"] = family.to_json()
    report.certified = report.certified and family.respects_bound
    return report


def advantage_ratio_state(
    model: GptModel,
    free: FreeStateSet,
    state,
    channel_family: Optional[Sequence[Tuple[ChannelEnsemble, Measurement]]] = None,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Channel discrimination advantage of a state over all free states.

    The task is the ensemble {1: id, 0: constant channel} measured by
    {X / |X|, U - X / |X|}, X the generalized robustness witness; the free
    baseline is max over F of <X / |X|, s>.

    Args:
        model: The model
        free: Free state set
        state: The resource state
        channel_family: Optional (ChannelEnsemble, Measurement) tasks whose
            ratios must stay below 1 + R; reported under details and
            required for certification
        settings: Solver settings
        tol: Certification tolerance

    Raises:
        ContractViolation: Infinite robustness, or an empty or mismatched
            channel family
    """
    rob = generalized_robustness_state(model, free, state, settings)
    _require_finite(rob, "generalized robustness")
    family = None
    if channel_family is not None:
        family = _check_channel_family(model, free, state, channel_family, 1.0 + rob.value, settings, tol)
    _, m = _binary_witness_measurement(model, rob.witness)
    if m is None:
        return _with_family(_trivial("state", rob, tol), family)
    ensemble = ChannelEnsemble([1.0, 0.0], [Channel.identity(model), _placeholder_channel(model, free)])
    task = ChannelTask(ensemble, state, m)
    numerator = p_succ(task)
    denominator, best_free = free.support(task.score_functional(), settings)
    report = _report("state", numerator, denominator, 1.0 + rob.value, task, rob, tol,
                     {"best_free_state": best_free})
    return _with_family(report, family)


def advantage_ratio_subchannel(
    model: GptModel,
    free: FreeStateSet,
    state,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Subchannel discrimination with the single subchannel id and the witness
    measurement, the last outcome inconclusive.
    """
    rob = generalized_robustness_state(model, free, state, settings)
    _require_finite(rob, "generalized robustness")
    _, m = _binary_witness_measurement(model, rob.witness)
    if m is None:
        return _trivial("subchannel", rob, tol)
    task = SubchannelTask([Subchannel(model, model, np.eye(model.dim))], state, m, inconclusive=True)
    numerator = p_succ(task)
    denominator, _ = free.support(task.score_functional(), settings)
    return _report("subchannel", numerator, denominator, 1.0 + rob.value, task, rob, tol)


def witness_ensemble(model: GptModel, rob: RobustnessResult) -> StateEnsemble:
    """
    The ensemble p_i = <U, w_i> / S, s_i = w_i / <U, w_i> built from a
    measurement robustness witness; components of zero mass get p_i = 0 and
    the reference state.

    Raises:
        InternalError: If every witness component has zero mass
    """
    masses = np.array([max(0.0, float(model.unit_effect @ w)) for w in rob.witness])
    masses[masses <= ZERO] = 0.0
    total = float(np.sum(masses))
    if total <= ZERO:
        raise InternalError("measurement robustness witness has zero mass")
    reference = model.reference_state()
    states = [clean_state(model, w) if mass > 0.0 else reference for w, mass in zip(rob.witness, masses)]
    return StateEnsemble(model, masses / total, states, SOLVER_OBJECT_TOL)


def advantage_ratio_measurement(
    model: GptModel,
    free: FreeEffectCone,
    measurement,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    State discrimination advantage of a measurement over free measurements,
    on the ensemble built from its robustness witness.

    Raises:
        InternalError: If every witness component has zero mass
    """
    m = ensure_measurement(model, measurement)
    rob = measurement_robustness(model, free, m, settings)
    ensemble = witness_ensemble(model, rob)
    task = StateTask(ensemble, m)
    numerator = p_succ(task)
    denominator, best_free = optimal_p_succ(model, ensemble, free, settings)
    return _report("measurement", numerator, denominator, 1.0 + rob.value, task, rob, tol,
                   {"best_free_measurement": best_free.effects})


def advantage_ratio_generating(
    model_in: GptModel,
    model_out: GptModel,
    free_in: FreeStateSet,
    free_out: FreeStateSet,
    channel: Channel,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Inconclusive discrimination of the single-element ensemble {1, L(s*)}
    with {W / |W|, U' - W / |W|}, against free output ensembles under the
    identity map.
    """
    rob = generating_power(model_in, model_out, free_in, free_out, channel, settings)
    _require_finite(rob, "robustness generating power")
    _, m = _binary_witness_measurement(model_out, rob.witness)
    if m is None:
        return _trivial("generating", rob, tol)
    s_star = rob.details["free_state"]
    task = ChannelTask(ChannelEnsemble([1.0], [channel]), s_star, m, inconclusive=True)
    numerator = p_succ(task)
    denominator, _ = free_out.support(m.effects[0], settings)
    return _report("generating", numerator, denominator, 1.0 + rob.value, task, rob, tol,
                   {"free_state": s_star})


def _choi_witness_measurement(free: FreeChannelSet, y: np.ndarray) -> Tuple[GptModel, Optional[Measurement]]:
    out_model = quantum_model(free.d_in * free.d_out)
    _, m = _binary_witness_measurement(out_model, y)
    return out_model, m


def advantage_ratio_channel(
    free: FreeChannelSet,
    channel: Channel,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Entanglement-assisted discrimination of a channel against O_F: input
    |Phi+>, measurement {Y / |Y|, I - Y / |Y|}, Y the channel robustness
    witness; the free baseline is max over O_F of Tr[Y J] / (d |Y|).
    """
    rob = channel_robustness(free, channel, settings)
    _require_finite(rob, "channel robustness")
    out_model, m = _choi_witness_measurement(free, rob.witness)
    if m is None:
        return _trivial("channel", rob, tol)
    d = free.d_in
    placeholder = replacer_channel(channel.model_in, channel.model_out, channel.model_out.reference_state())
    ensemble = ChannelEnsemble([1.0, 0.0], [channel, placeholder])
    task = ChannelTask(ensemble, max_entangled_state(d), m, ancilla=d)
    numerator = p_succ(task)
    support, _ = free.support(m.effects[0], settings)
    return _report("channel", numerator, support / d, 1.0 + rob.value, task, rob, tol)


def advantage_ratio_channel_ensemble(
    free: FreeChannelSet,
    probs: Sequence[float],
    channels: Sequence[Channel],
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Ensemble version: M_j* = Y_j* / |Y_j*|, every other conclusive effect 0,
    the remainder inconclusive; input |Phi+>.

    Raises:
        ContractViolation: If some p_j is zero
    """
    rob = ensemble_channel_robustness(free, probs, channels, settings)
    _require_finite(rob, "ensemble channel robustness")
    k = rob.details["argmax"]
    out_model, m = _choi_witness_measurement(free, rob.witness)
    if m is None:
        return _trivial("channel_ensemble", rob, tol)
    n = len(channels)
    effects = [np.zeros(out_model.dim) for _ in range(n)]
    effects[k] = m.effects[0]
    effects.append(m.effects[1])
    d = free.d_in
    task = ChannelTask(ChannelEnsemble(probs, channels), max_entangled_state(d),
                       Measurement(out_model, effects, SOLVER_OBJECT_TOL), inconclusive=True, ancilla=d)
    numerator = p_succ(task)
    support, _ = free.support(m.effects[0], settings)
    denominator = float(task.ensemble.probs[k]) * support / d
    return _report("channel_ensemble", numerator, denominator, 1.0 + rob.value, task, rob, tol,
                   {"argmax": k})


def gain_ratio_standard(
    model_in: GptModel,
    model_out: GptModel,
    free: FreeStateSet,
    state,
    restriction: Union[None, EffectConeFamily, Sequence[Measurement]] = None,
    outputs: Optional[Sequence] = None,
    settings: Optional[SolverSettings] = None,
    tol: float = REPORT_TOL
) -> AdvantageReport:
    """
    Balanced binary channel discrimination gain p_succ - 1/2.

    The channels are the measure-and-prepare pair

        L0(x) = 1/2 <U + X'/|X'|, x> e0 + 1/2 <U - X'/|X'|, x> e1
        L1(x) = 1/2 <U - X'/|X'|, x> e0 + 1/2 <U + X'/|X'|, x> e1

    with X' the standard robustness witness (the functional vanishing on F
    when the robustness diverges). The optimal gain is |L0(x) - L1(x)| / 4 in
    the base norm, or in the distinguishability norm of the restriction.
    When the robustness diverges the report certifies that every free state
    has zero gain while the input has a positive one.

    Args:
        outputs: Two distinct output states (defaults to the first two
            basis states or vertices)

    Raises:
        ContractViolation: If the output states coincide
    """
    w = model_in.check(state)
    e0, e1 = (model_out.check(o) for o in outputs) if outputs is not None else model_out.distinct_states(2)
    if np.linalg.norm(e0 - e1) <= 1e-9:
        raise ContractViolation("the two prepared output states must be distinct")
    rob = standard_robustness_state(model_in, free, w, settings)
    x = rob.witness
    norm = order_unit_norm(model_in, x)
    u = model_in.unit_effect
    m = Measurement(model_in, [0.5 * (u + x / norm), 0.5 * (u - x / norm)], SOLVER_OBJECT_TOL)
    lam0 = measure_and_prepare(m, [e0, e1], model_out)
    lam1 = measure_and_prepare(m, [e1, e0], model_out)

    if restriction is None:
        def out_norm(v):
            return base_norm(model_out, v)
    else:
        def out_norm(v):
            return distinguishability_norm(model_out, restriction, v, settings=settings)

    numerator = 0.25 * out_norm(lam0(w) - lam1(w))
    pair_norm = out_norm(e0 - e1)
    free_max = max(free.support(x, settings)[0], free.support(-x, settings)[0])
    denominator = max(0.0, free_max) * pair_norm / (4.0 * norm)

    ensemble = StateEnsemble(model_out, [0.5, 0.5], [clean_state(model_out, lam0(w)), clean_state(model_out, lam1(w))],
                             SOLVER_OBJECT_TOL)
    _, best = optimal_p_succ(model_out, ensemble, restriction, settings)
    task = ChannelTask(ChannelEnsemble([0.5, 0.5], [lam0, lam1]), w, best)

    predicted = 1.0 + 2.0 * rob.value
    details = {"free_gain": denominator, "resource_gain": numerator, "divergent": not rob.finite}
    if rob.finite:
        return _report("standard", numerator, denominator, predicted, task, rob, tol, details)
    certified = denominator <= DIVERGENCE_TOL and numerator > DIVERGENCE_TOL
    if certified:
        logger.info("standard: divergence certified, free gain %.3e, resource gain %.6g", denominator, numerator)
    else:
        logger.warning("standard: divergence not certified, free gain %.3e, resource gain %.6g",
                       denominator, numerator)
    ratio = _ratio(numerator, denominator) if denominator > DIVERGENCE_TOL else math.inf
    return AdvantageReport("standard", numerator, denominator, ratio, predicted,
                           _discrepancy(ratio, predicted), certified, task, rob, details)


# Upper-bound sweeps


@dataclass
class SweepResult:
    """
    Random-task check of an advantage upper bound.

    Attributes:
        bound: The bound 1 + R
        max_ratio: Largest observed ratio
        rows: One row per task (index, numerator, denominator, ratio)
        slack: Allowed excess over the bound
    """
    bound: float
    max_ratio: float
    rows: List[Dict[str, float]]
    slack: float = 1e-6

    @property
    def respects_bound(self) -> bool:
        return self.max_ratio <= self.bound + self.slack

    def to_json(self) -> Dict[str, Any]:
        return {
            "bound": json_number(self.bound),
            "max_ratio": json_number(self.max_ratio),
            "respects_bound": self.respects_bound,
            "tasks": len(self.rows)
        }


def _sweep(bound: float, pairs: List[Tuple[float, float]], slack: float) -> SweepResult:
    rows = []
    for i, (num, den) in enumerate(pairs):
        rows.append({"index": i, "numerator": num, "denominator": den, "ratio": _ratio(num, den)})
    max_ratio = max((r["ratio"] for r in rows), default=1.0)
    result = SweepResult(bound, max_ratio, rows, slack)
    if not result.respects_bound:
        logger.warning("sweep exceeded its bound: %.9g > %.9g", max_ratio, bound)
    return result


def _rng(rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(1234)


def sweep_state_tasks(
    model: GptModel,
    free: FreeStateSet,
    state,
    n_tasks: int = 300,
    rng: Optional[np.random.Generator] = None,
    n_channels: int = 2,
    bound: Optional[float] = None,
    settings: Optional[SolverSettings] = None,
    slack: float = 1e-6
) -> SweepResult:
    """Random channel ensembles and measurements; ratio against max over F."""
    rng = _rng(rng)
    if bound is None:
        bound = 1.0 + generalized_robustness_state(model, free, state, settings).value
    pairs = []
    for _ in range(n_tasks):
        channels = [random_channel(model, model, rng) for _ in range(n_channels)]
        ensemble = ChannelEnsemble(rng.dirichlet(np.ones(n_channels)), channels)
        task = ChannelTask(ensemble, state, random_measurement(model, n_channels, rng))
        pairs.append((p_succ(task), free.support(task.score_functional(), settings)[0]))
    return _sweep(bound, pairs, slack)


def _random_instrument(model: GptModel, n: int, rng: np.random.Generator) -> List[Subchannel]:
    """P_k(x) = 1/2 <N_k, x> t_k + 1/2 q_k L_k(x)."""
    meas = random_measurement(model, n, rng)
    q = rng.dirichlet(np.ones(n))
    out = []
    for k in range(n):
        prep = random_state(model, rng)
        lam = random_channel(model, model, rng)
        matrix = 0.5 * np.outer(prep, meas.effects[k]) + 0.5 * q[k] * lam.matrix
        out.append(Subchannel(model, model, matrix, tol=1e-8))
    return out


def sweep_subchannel_tasks(
    model: GptModel,
    free: FreeStateSet,
    state,
    n_tasks: int = 300,
    rng: Optional[np.random.Generator] = None,
    n_subchannels: int = 2,
    bound: Optional[float] = None,
    settings: Optional[SolverSettings] = None,
    slack: float = 1e-6
) -> SweepResult:
    """Random instruments and measurements; ratio against max over F."""
    rng = _rng(rng)
    if bound is None:
        bound = 1.0 + generalized_robustness_state(model, free, state, settings).value
    pairs = []
    for _ in range(n_tasks):
        task = SubchannelTask(_random_instrument(model, n_subchannels, rng), state,
                              random_measurement(model, n_subchannels, rng), tol=1e-8)
        pairs.append((p_succ(task), free.support(task.score_functional(), settings)[0]))
    return _sweep(bound, pairs, slack)


def sweep_measurement_tasks(
    model: GptModel,
    free: FreeEffectCone,
    measurement,
    n_tasks: int = 200,
    rng: Optional[np.random.Generator] = None,
    bound: Optional[float] = None,
    settings: Optional[SolverSettings] = None,
    slack: float = 1e-6
) -> SweepResult:
    """Random state ensembles; ratio of p_succ with M over the free optimum."""
    rng = _rng(rng)
    m = ensure_measurement(model, measurement)
    if bound is None:
        bound = 1.0 + measurement_robustness(model, free, m, settings).value
    pairs = []
    for _ in range(n_tasks):
        n = m.n_outcomes
        ensemble = StateEnsemble(model, rng.dirichlet(np.ones(n)), [random_state(model, rng) for _ in range(n)],
                                 tol=1e-8)
        numerator = p_succ(StateTask(ensemble, m))
        pairs.append((numerator, optimal_p_succ(model, ensemble, free, settings)[0]))
    return _sweep(bound, pairs, slack)


def choi_score_functional(
    free: FreeChannelSet,
    ensemble: StateEnsemble,
    measurement: Measurement
) -> np.ndarray:
    """
    y with sum_i p_i <M_i, (id (x) X)(w_i)> = Tr[y J_X] for every map X.
    """
    model_in = quantum_model(free.d_in)
    model_out = quantum_model(free.d_out)
    y = np.zeros(free.choi_dim)
    for k in range(free.choi_dim):
        e = np.zeros(free.choi_dim)
        e[k] = 1.0
        basis_map = Channel(model_in, model_out, matrix_from_choi(e, free.d_in, free.d_out), validate=False)
        y[k] = sum(p * float(mi @ apply_id_tensor(basis_map, w, free.d_in))
                   for p, w, mi in zip(ensemble.probs, ensemble.states, measurement.effects))
    return y


def sweep_channel_tasks(
    free: FreeChannelSet,
    channel: Channel,
    n_tasks: int = 200,
    rng: Optional[np.random.Generator] = None,
    n_states: int = 2,
    bound: Optional[float] = None,
    settings: Optional[SolverSettings] = None,
    slack: float = 1e-6
) -> SweepResult:
    """
    Random ensembles of states on the ancilla and input, random measurements
    on the output; ratio under id (x) L against the best free channel.
    """
    rng = _rng(rng)
    if bound is None:
        bound = 1.0 + channel_robustness(free, channel, settings).value
    d = free.d_in
    joint_in = quantum_model(d * d)
    joint_out = quantum_model(d * free.d_out)
    pairs = []
    for _ in range(n_tasks):
        ensemble = StateEnsemble(joint_in, rng.dirichlet(np.ones(n_states)),
                                 [random_state(joint_in, rng) for _ in range(n_states)], tol=1e-8)
        m = random_measurement(joint_out, n_states, rng)
        numerator = sum(p * float(mi @ apply_id_tensor(channel, w, d))
                        for p, w, mi in zip(ensemble.probs, ensemble.states, m.effects))
        y = choi_score_functional(free, ensemble, m)
        pairs.append((numerator, free.support(y, settings)[0]))
    return _sweep(bound, pairs, slack)
