"""
Convertibility of states, measurements and state ensembles under a free
operation set O, with separating discrimination tasks when conversion fails.

Every question is posed as one separation program. For state ensembles
{s_i} -> {t_i} with priors p_i it reads

    V = max over L in O of  min over measurements M of  sum_i p_i <M_i, L(s_i) - t_i>
      = - min { <U, x> : x + p_i (L(s_i) - t_i) in C for every i  [, x in C] }

with the optional bracket adding an inconclusive outcome. Conversion exists
iff V = 0 (inconclusive form); the multipliers of the conic rows form the
measurement attaining the inner minimum, which is the separating task when
V < 0. Measurements convert by the dual maps L^* of O, with the roles of
states and effects exchanged.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.types import ContractViolation, SOLVER_OBJECT_TOL
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone
from src.gpt.channels import random_measurement
from src.gpt.model import GptModel
from src.gpt.norms import order_unit_norm
from src.gpt.objects import Channel, Measurement, State, clean_state, ensure_measurement
from src.robustness.result import json_number, json_witness
from src.solver.builder import ProgramBuilder
from src.solver.program import SolverSettings
from .operations import FreeOperationSet, action_matrix

logger = logging.getLogger(__name__)

UNARY = "unary"
BINARY_BALANCED = "binary_balanced"
FAMILIES = (UNARY, BINARY_BALANCED)

CONCLUSIVE = "conclusive"
INCONCLUSIVE = "inconclusive"

# separation value above -FEASIBILITY_TOL counts as convertible
FEASIBILITY_TOL = 1e-6
MARGIN_TOL = 1e-7
ZERO = 1e-12


@dataclass
class ConversionWitness:
    """
    A task whose optimal value ranks the target strictly above the source.

    Attributes:
        family: "unary", "binary_balanced", "conclusive", "inconclusive" or
            "ensemble" (measurement conversion)
        effects: Effects of the witness measurement (empty for ensembles)
        probs: Priors of the task
        states: States of the witness ensemble (measurement conversion only)
        value_from: Task value of the source object
        value_to: Task value of the target object
    """
    family: str
    effects: List[np.ndarray]
    probs: Optional[np.ndarray]
    value_from: float
    value_to: float
    states: Optional[List[np.ndarray]] = None

    @property
    def margin(self) -> float:
        return self.value_to - self.value_from

    def measurement(self, model: GptModel) -> Measurement:
        return Measurement.repair(model, self.effects, tol=SOLVER_OBJECT_TOL)

    def to_json(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "effects": json_witness(self.effects),
            "probs": json_witness(self.probs),
            "states": json_witness(self.states),
            "value_from": float(self.value_from),
            "value_to": float(self.value_to),
            "margin": float(self.margin)
        }


@dataclass
class ConversionVerdict:
    """
    Attributes:
        feasible: Whether a free conversion exists
        channel: Converting channel (feasible verdicts)
        witness: Separating task (infeasible verdicts, when one was found)
        separation: -V of the separation program (0 when feasible)
        complete_family: Whether O was asserted closed under concatenation, so
            the witness family is a complete set of monotones
        operations: Name of O
        details: Residuals and search bookkeeping
    """
    feasible: bool
    channel: Optional[Channel]
    witness: Optional[ConversionWitness]
    separation: float
    complete_family: bool
    operations: str
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.witness.margin if self.witness is not None else 0.0

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "feasible": self.feasible,
            "channel": self.channel.matrix.tolist() if self.channel is not None else None,
            "witness": self.witness.to_json() if self.witness is not None else None,
            "separation": json_number(self.separation),
            "operations": self.operations
        }
        # the completeness claim is only quoted for concatenation-closed sets
        if self.complete_family:
            out["complete_family"] = True
        if self.details:
            out["details"] = json_witness(self.details)
        return out


def _separation_program(
    ops: FreeOperationSet,
    probs: Sequence[float],
    sources: Sequence[np.ndarray],
    targets: Sequence[np.ndarray],
    inconclusive: bool,
    settings: Optional[SolverSettings],
    label: str
) -> Tuple[float, np.ndarray, List[np.ndarray]]:
    model_out = ops.model_out
    d_out = model_out.dim
    b = ProgramBuilder(label)
    ell = ops.add_channel_variable(b, "channel")
    x = b.add_variable("bound", d_out)
    for i, (p, s, t) in enumerate(zip(probs, sources, targets)):
        b.add_conic({x: 1.0, ell: p * action_matrix(s, d_out)}, model_out.state_cone,
                    f"hypothesis {i}", constant=-p * t)
    if inconclusive:
        b.add_conic({x: 1.0}, model_out.state_cone, "inconclusive")
    b.set_objective({x: model_out.unit_effect})
    result = b.solve(settings).require(label)
    effects = [result.multiplier(f"hypothesis {i}") for i in range(len(sources))]
    if inconclusive:
        effects.append(result.multiplier("inconclusive"))
    logger.debug("%s: separation value %.9g", label, -result.objective)
    return -result.objective, result.value(ell), effects


def _clip_effect(model: GptModel, e: np.ndarray) -> np.ndarray:
    """Pull a solver effect into [0, U], rescaling by its order-unit norm."""
    if isinstance(model.state_cone, (OrthantCone, PsdCone)):
        e = model.state_cone.project(e)
    norm = order_unit_norm(model, e)
    return e / norm if norm > 1.0 else e


def _feasible_verdict(
    ops: FreeOperationSet,
    vec: np.ndarray,
    pairs: Sequence[Tuple[np.ndarray, np.ndarray]],
    value: float,
    details: Optional[Dict[str, Any]] = None
) -> ConversionVerdict:
    channel = ops.channel_from_vector(vec)
    residual = max(float(np.max(np.abs(channel(s) - t))) for s, t in pairs)
    info = {"residual": residual, "member": ops.contains(channel, SOLVER_OBJECT_TOL)}
    info.update(details or {})
    logger.info("conversion under %s is feasible (residual %.3e)", ops.name, residual)
    return ConversionVerdict(True, channel, None, max(0.0, -value), ops.concatenation_closed, ops.name, info)


def tilde_p_succ(
    measurement,
    state,
    ops: FreeOperationSet,
    probs: Optional[Sequence[float]] = None,
    settings: Optional[SolverSettings] = None
) -> float:
    """
    Best success probability of discriminating channels of O applied to a state.

    The measurement has N + 1 outcomes, the last being inconclusive. With
    probs fixed the value is sum_i p_i max_L <M_i, L(w)>; otherwise the
    priors are free and all mass goes to the best index.

    Args:
        measurement: Measurement (or effect list) on O's output model
        state: State of O's input model
        ops: Free operation set
        probs: Fixed priors of length N, or None
        settings: Solver settings

    Returns:
        The optimal success probability
    """
    m = ensure_measurement(ops.model_out, measurement, SOLVER_OBJECT_TOL)
    w = ops.model_in.check(state, "state")
    n = m.n_outcomes - 1
    if n < 1:
        raise ContractViolation("the measurement needs at least one conclusive outcome")
    if probs is not None:
        p = np.asarray(probs, dtype=float)
        if p.shape != (n,):
            raise ContractViolation(f"{p.size} priors for {n} conclusive outcomes")
        return float(sum(pi * ops.best_value(e, w, settings)
                         for pi, e in zip(p, m.effects[:n]) if pi > 0))
    return max(ops.best_value(e, w, settings) for e in m.effects[:n])


def _unary_witness(
    ops: FreeOperationSet,
    source: np.ndarray,
    target: np.ndarray,
    effect: np.ndarray,
    settings: Optional[SolverSettings]
) -> Optional[ConversionWitness]:
    e = _clip_effect(ops.model_out, effect)
    value_from = ops.best_value(e, source, settings)
    value_to = ops.best_value(e, target, settings)
    if value_to - value_from <= MARGIN_TOL:
        logger.warning("separating effect ranks the states with margin %.3e only", value_to - value_from)
        return None
    return ConversionWitness(UNARY, [e, ops.model_out.unit_effect - e], np.array([1.0]),
                             value_from, value_to)


def _binary_witness(
    ops: FreeOperationSet,
    source: np.ndarray,
    target: np.ndarray,
    effect: np.ndarray,
    settings: Optional[SolverSettings]
) -> ConversionWitness:
    u = ops.model_out.unit_effect
    effects = [effect, np.zeros_like(effect), u - effect]
    probs = np.array([0.5, 0.5])
    return ConversionWitness(
        BINARY_BALANCED, effects, probs,
        tilde_p_succ(effects, source, ops, probs, settings),
        tilde_p_succ(effects, target, ops, probs, settings)
    )


def convertible_state(
    ops: FreeOperationSet,
    omega,
    omega_prime,
    settings: Optional[SolverSettings] = None
) -> ConversionVerdict:
    """
    Decide whether some L in O maps omega to omega'.

    Args:
        ops: Free operation set containing the identity
        omega: Source state
        omega_prime: Target state
        settings: Solver settings

    Returns:
        ConversionVerdict; infeasible verdicts carry a unary witness E with
        max_L <E, L(omega)> < max_L <E, L(omega')>

    Raises:
        ContractViolation: If O does not contain the identity or a state is invalid
    """
    ops.require_identity()
    w = State(ops.model_in, omega).vector
    w2 = State(ops.model_out, omega_prime).vector
    value, vec, effects = _separation_program(ops, [1.0], [w], [w2], True, settings, "state conversion")
    if value >= -FEASIBILITY_TOL:
        return _feasible_verdict(ops, vec, [(w, w2)], value)
    witness = _unary_witness(ops, w, w2, effects[0], settings)
    logger.info("conversion under %s is infeasible (separation %.9g)", ops.name, -value)
    return ConversionVerdict(False, None, witness, -value, ops.concatenation_closed, ops.name)


def monotone_violation_search(
    omega,
    omega_prime,
    ops: FreeOperationSet,
    family: str = UNARY,
    settings: Optional[SolverSettings] = None
) -> Optional[ConversionWitness]:
    """
    A task of the given family on which omega' beats omega, or None when
    omega converts to omega'.

    Args:
        omega: Source state
        omega_prime: Claimed target
        ops: Free operation set
        family: "unary" (priors {1, 0}) or "binary_balanced" (priors {1/2, 1/2},
            three outcomes {E, 0, U - E})
        settings: Solver settings
    """
    if family not in FAMILIES:
        raise ContractViolation(f"unknown witness family {family!r}, expected one of {FAMILIES}")
    verdict = convertible_state(ops, omega, omega_prime, settings)
    if verdict.feasible or verdict.witness is None:
        return None
    if family == UNARY:
        return verdict.witness
    w = ops.model_in.check(omega)
    w2 = ops.model_out.check(omega_prime)
    return _binary_witness(ops, w, w2, verdict.witness.effects[0], settings)


# conversion with a free preprocessing step

@dataclass
class PreprocessingComparison:
    """
    Values max_X sum_i p_i <M_i, L_i(X(w))> of one task for both states.

    Attributes:
        value_from: Value for the source state
        value_to: Value for the target state
        respects: value_from >= value_to up to the tolerance
    """
    value_from: float
    value_to: float
    respects: bool


@dataclass
class PreprocessingSweep:
    """
    Attributes:
        verdict: Direct conversion verdict
        n_tasks: Tasks evaluated (random plus witness-driven)
        violations: Tasks on which the target beat the source
        max_violation: Largest value_to - value_from observed
        consistent: No violation iff the conversion is feasible
        violating_task: (priors, measurement effects) of the worst violation
    """
    verdict: ConversionVerdict
    n_tasks: int
    violations: int
    max_violation: float
    consistent: bool
    violating_task: Optional[Tuple[np.ndarray, List[np.ndarray]]] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.to_json(),
            "n_tasks": self.n_tasks,
            "violations": self.violations,
            "max_violation": float(self.max_violation),
            "consistent": self.consistent,
            "violating_task": json_witness(list(self.violating_task)) if self.violating_task else None
        }


def _identity_index(ops: FreeOperationSet, channels: Sequence[Channel]) -> int:
    for k, ch in enumerate(channels):
        if ch.model_in != ops.model_out:
            raise ContractViolation("task channels must act on the output model of O")
        if ch.model_out == ch.model_in and np.allclose(ch.matrix, np.eye(ch.model_in.dim), atol=1e-12):
            return k
    raise ContractViolation("the channel list must contain the identity channel")


def preprocessing_value(
    ops: FreeOperationSet,
    channels: Sequence[Channel],
    probs: Sequence[float],
    measurement,
    state,
    settings: Optional[SolverSettings] = None
) -> float:
    """max over X in O of sum_i p_i <M_i, L_i(X(w))>."""
    model = channels[0].model_out
    if any(ch.model_out != model for ch in channels):
        raise ContractViolation("task channels must share their output model")
    m = ensure_measurement(model, measurement, SOLVER_OBJECT_TOL)
    if m.n_outcomes != len(channels) or len(probs) != len(channels):
        raise ContractViolation("one prior and one outcome per channel are needed")
    functional = sum(p * ch.dual(e) for p, ch, e in zip(probs, channels, m.effects))
    return ops.best_value(functional, state, settings)


def convertible_with_preprocessing(
    omega,
    omega_prime,
    ops: FreeOperationSet,
    channels: Sequence[Channel],
    probs: Sequence[float],
    measurement,
    settings: Optional[SolverSettings] = None,
    tol: float = 1e-7
) -> PreprocessingComparison:
    """
    Compare both states on one preprocessing-assisted channel discrimination task.

    Raises:
        ContractViolation: If the channel list lacks the identity
    """
    _identity_index(ops, channels)
    w = ops.model_in.check(omega, "state")
    w2 = ops.model_in.check(omega_prime, "state")
    a = preprocessing_value(ops, channels, probs, measurement, w, settings)
    b = preprocessing_value(ops, channels, probs, measurement, w2, settings)
    return PreprocessingComparison(a, b, a >= b - tol)


def sample_preprocessing_tasks(
    model: GptModel,
    n_channels: int,
    n_tasks: int,
    rng: Optional[np.random.Generator] = None
) -> List[Tuple[np.ndarray, Measurement]]:
    """Random (priors, measurement) pairs for tasks with n_channels hypotheses."""
    rng = rng if rng is not None else np.random.default_rng(1234)
    return [(rng.dirichlet(np.ones(n_channels)), random_measurement(model, n_channels, rng))
            for _ in range(n_tasks)]


def preprocessing_sweep(
    omega,
    omega_prime,
    ops: FreeOperationSet,
    channels: Sequence[Channel],
    n_tasks: int = 200,
    rng: Optional[np.random.Generator] = None,
    settings: Optional[SolverSettings] = None,
    tol: float = 1e-7
) -> PreprocessingSweep:
    """
    Decide conversion through preprocessing-assisted tasks with a fixed
    channel list: random draws plus, when the direct verdict is infeasible,
    the task built from its unary witness (all prior on the identity).
    """
    k = _identity_index(ops, channels)
    verdict = convertible_state(ops, omega, omega_prime, settings)
    model = channels[0].model_out
    tasks = [(p, m.effects) for p, m in sample_preprocessing_tasks(model, len(channels), n_tasks, rng)]
    if verdict.witness is not None and len(channels) > 1:
        e = verdict.witness.effects[0]
        probs = np.zeros(len(channels))
        probs[k] = 1.0
        effects = [np.zeros(model.dim) for _ in channels]
        effects[k] = e
        effects[(k + 1) % len(channels)] = model.unit_effect - e
        tasks.append((probs, effects))

    violations, worst, worst_task = 0, -np.inf, None
    for probs, effects in tasks:
        c = convertible_with_preprocessing(omega, omega_prime, ops, channels, probs, effects, settings, tol)
        gap = c.value_to - c.value_from
        if not c.respects:
            violations += 1
        if gap > worst:
            worst, worst_task = gap, (np.asarray(probs), [np.asarray(e) for e in effects])
    consistent = (violations == 0) == verdict.feasible
    if not consistent:
        logger.warning("preprocessing sweep disagrees with the direct verdict under %s", ops.name)
    return PreprocessingSweep(verdict, len(tasks), violations, float(worst), consistent,
                              worst_task if violations else None)


def detect_noise(
    omega,
    omega_prime,
    ops: FreeOperationSet,
    noise: Channel,
    n_tasks: int = 200,
    rng: Optional[np.random.Generator] = None,
    settings: Optional[SolverSettings] = None
) -> PreprocessingSweep:
    """Noise detection: the preprocessing sweep with channels {id, noise}."""
    if noise.model_in != noise.model_out:
        raise ContractViolation("the noise channel must map a model to itself")
    return preprocessing_sweep(omega, omega_prime, ops, [Channel.identity(noise.model_in), noise],
                               n_tasks, rng, settings)


# measurements and ensembles

def tilde_p_succ_ensemble(
    ops: FreeOperationSet,
    probs: Sequence[float],
    states: Sequence,
    measurement,
    settings: Optional[SolverSettings] = None
) -> float:
    """
    max over L in O of sum_a p_a <M_a, L(s_a)>; extra measurement outcomes
    beyond the ensemble are inconclusive.
    """
    m = ensure_measurement(ops.model_out, measurement, SOLVER_OBJECT_TOL)
    if m.n_outcomes < len(states):
        raise ContractViolation("the measurement needs one outcome per state")
    g = sum(p * np.outer(e, ops.model_in.check(s)) for p, e, s in zip(probs, m.effects, states))
    value, _ = ops.support(g, settings)
    return value


def _ensemble_witness(
    ops: FreeOperationSet,
    probs: np.ndarray,
    sources: List[np.ndarray],
    targets: List[np.ndarray],
    effects: List[np.ndarray],
    family: str,
    settings: Optional[SolverSettings]
) -> Optional[ConversionWitness]:
    model = ops.model_out
    try:
        m = Measurement.repair(model, [_clip_effect(model, e) for e in effects], tol=SOLVER_OBJECT_TOL)
    except ContractViolation as exc:
        logger.warning("separating measurement could not be repaired: %s", exc)
        return None
    value_from = tilde_p_succ_ensemble(ops, probs, sources, m, settings)
    value_to = tilde_p_succ_ensemble(ops, probs, targets, m, settings)
    if value_to - value_from <= MARGIN_TOL:
        return None
    return ConversionWitness(family, m.effects, probs, value_from, value_to)


def _candidate_priors(n: int) -> List[np.ndarray]:
    out = [np.full(n, 1.0 / n)]
    for i in range(n):
        p = np.full(n, 0.5 / (n - 1))
        p[i] = 0.5
        out.append(p)
    return out


def convertible_ensemble(
    ops: FreeOperationSet,
    sources: Sequence,
    targets: Sequence,
    mode: str = INCONCLUSIVE,
    probs: Optional[Sequence[float]] = None,
    settings: Optional[SolverSettings] = None
) -> ConversionVerdict:
    """
    Decide whether one L in O maps every s_i to t_i.

    Args:
        ops: Free operation set containing the identity
        sources: States s_i
        targets: States t_i, same length
        mode: "inconclusive" (fixed positive priors, N >= 1) or "conclusive"
            (N >= 2, witness priors searched among uniform and tilted ones)
        probs: Priors for the inconclusive mode (default uniform)
        settings: Solver settings

    Returns:
        ConversionVerdict; the witness is a measurement with
        max_L sum p_i <M_i, L(s_i)> < max_L sum p_i <M_i, L(t_i)>

    Raises:
        ContractViolation: Length mismatch, N = 1 in conclusive mode,
            nonpositive priors or a missing identity
    """
    if mode not in (CONCLUSIVE, INCONCLUSIVE):
        raise ContractViolation(f"unknown mode {mode!r}")
    n = len(sources)
    if n == 0 or len(targets) != n:
        raise ContractViolation("collections must be nonempty and of equal length")
    if mode == CONCLUSIVE and n < 2:
        raise ContractViolation("conclusive ensemble conversion needs at least two states")
    ops.require_identity()
    s = [State(ops.model_in, x).vector for x in sources]
    t = [State(ops.model_out, x).vector for x in targets]
    p = np.full(n, 1.0 / n) if probs is None else np.asarray(probs, dtype=float)
    if p.shape != (n,) or np.min(p) <= 0 or abs(float(np.sum(p)) - 1.0) > 1e-9:
        raise ContractViolation("priors must be positive and sum to 1")

    value, vec, effects = _separation_program(ops, p, s, t, True, settings, "ensemble conversion")
    if value >= -FEASIBILITY_TOL:
        return _feasible_verdict(ops, vec, list(zip(s, t)), value, {"mode": mode})

    witness = None
    details: Dict[str, Any] = {"mode": mode}
    if mode == INCONCLUSIVE:
        witness = _ensemble_witness(ops, p, s, t, effects, INCONCLUSIVE, settings)
    else:
        for k, prior in enumerate(_candidate_priors(n)):
            v, _, eff = _separation_program(ops, prior, s, t, False, settings, "conclusive separation")
            if v >= -FEASIBILITY_TOL:
                continue
            witness = _ensemble_witness(ops, prior, s, t, eff, CONCLUSIVE, settings)
            if witness is not None:
                details["prior_candidate"] = k
                break
        if witness is None:
            logger.warning("no conclusive witness among the candidate priors under %s", ops.name)
    logger.info("ensemble conversion under %s is infeasible (separation %.9g)", ops.name, -value)
    return ConversionVerdict(False, None, witness, -value, ops.concatenation_closed, ops.name, details)


def convertible_measurement(
    ops: FreeOperationSet,
    measurement,
    target,
    settings: Optional[SolverSettings] = None
) -> ConversionVerdict:
    """
    Decide whether M'_a = L^*(M_a) for every outcome and some L in O.

    The effect-side operations are the dual maps of O, which are unital and
    effect-cone preserving. The program maximizes t subject to
    L^*(M_a) - M'_a - t U in C*; its multipliers y_a in C with
    sum_a <U, y_a> = 1 are the witness ensemble p_a s_a = y_a.

    Returns:
        ConversionVerdict whose witness is an ensemble on which M' beats M

    Raises:
        ContractViolation: Outcome-count mismatch or a missing identity
    """
    ops.require_identity()
    model = ops.model_in
    m = ensure_measurement(model, measurement)
    m2 = ensure_measurement(model, target)
    if m.n_outcomes != m2.n_outcomes:
        raise ContractViolation(f"measurements have {m.n_outcomes} and {m2.n_outcomes} outcomes")
    d = model.dim
    b = ProgramBuilder("measurement conversion")
    ell = ops.add_channel_variable(b, "channel")
    t = b.add_variable("margin", 1)
    for a, (e, e2) in enumerate(zip(m.effects, m2.effects)):
        b.add_dual_conic({ell: np.kron(e.reshape(1, -1), np.eye(d)), t: -model.unit_effect.reshape(-1, 1)},
                         model.state_cone, f"outcome {a}", constant=-e2)
    b.set_objective({t: 1.0}, maximize=True)
    result = b.solve(settings).require("measurement conversion")
    value = result.objective
    if value >= -FEASIBILITY_TOL:
        channel = ops.channel_from_vector(result.value(ell))
        residual = max(float(np.max(np.abs(channel.dual(e) - e2))) for e, e2 in zip(m.effects, m2.effects))
        logger.info("measurement conversion under %s is feasible (residual %.3e)", ops.name, residual)
        return ConversionVerdict(True, channel, None, 0.0, ops.concatenation_closed, ops.name,
                                 {"residual": residual, "member": ops.contains(channel, SOLVER_OBJECT_TOL)})

    witness = _measurement_witness(ops, m, m2, [result.multiplier(f"outcome {a}") for a in range(m.n_outcomes)],
                                   settings)
    logger.info("measurement conversion under %s is infeasible (separation %.9g)", ops.name, -value)
    return ConversionVerdict(False, None, witness, -value, ops.concatenation_closed, ops.name,
                             {"concentrated": witness is not None and int(np.count_nonzero(witness.probs)) == 1})


def _measurement_witness(
    ops: FreeOperationSet,
    m: Measurement,
    m2: Measurement,
    ys: List[np.ndarray],
    settings: Optional[SolverSettings]
) -> Optional[ConversionWitness]:
    model = ops.model_in
    weights = np.array([max(model.normalization(y), 0.0) for y in ys])
    if float(np.sum(weights)) <= ZERO:
        logger.warning("measurement conversion multipliers vanish")
        return None
    probs = weights / np.sum(weights)
    states = [clean_state(model, y) if w > ZERO else model.reference_state() for y, w in zip(ys, weights)]

    def witness(p: np.ndarray) -> ConversionWitness:
        return ConversionWitness("ensemble", [], p,
                                 tilde_p_succ_ensemble(ops, p, states, m, settings),
                                 tilde_p_succ_ensemble(ops, p, states, m2, settings),
                                 states=states)

    # a single outcome with a single state separates whenever one suffices
    best = None
    for a in np.argsort(-probs):
        if probs[a] <= ZERO:
            break
        single = np.zeros_like(probs)
        single[a] = 1.0
        w = witness(single)
        if w.margin > MARGIN_TOL and (best is None or w.margin > best.margin):
            best = w
    if best is not None:
        return best
    full = witness(probs)
    return full if full.margin > MARGIN_TOL else None
