"""
Certification suites: every advantage identity and convertibility
statement checked on the bundled instances and on seeded random ones.

A suite is a list of cases, each a function of a seeded generator that
returns named checks. Cases run on a thread pool whose size is capped by
RF_THREADS; results are assembled in case order, so reports do not depend
on scheduling.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.core.types import ContractViolation
from src.cones.hermitian import herm_to_vec
from src.discrimination.advantage import (
    advantage_ratio_channel,
    advantage_ratio_channel_ensemble,
    advantage_ratio_generating,
    advantage_ratio_measurement,
    advantage_ratio_state,
    gain_ratio_standard,
    sweep_channel_tasks,
    sweep_measurement_tasks,
    sweep_state_tasks
)
from src.gpt.channels import (
    HADAMARD,
    bloch_state,
    ket_state,
    random_measurement,
    random_state,
    replacer_channel,
    unitary_channel
)
from src.gpt.model import classical_model, quantum_model
from src.gpt.objects import Channel, Measurement
from src.infotheory.accessible import accessible_advantage, sweep_accessible_gain
from src.monotones.convertibility import (
    CONCLUSIVE,
    convertible_ensemble,
    convertible_measurement,
    convertible_state,
    detect_noise,
    preprocessing_sweep
)
from src.monotones.operations import all_classical_channels, doubly_stochastic, unital_quantum
from src.robustness.channels import channel_robustness, generating_power
from src.robustness.free_sets import (
    GeneratorFreeSet,
    ReplacerChannels,
    diagonal_states,
    interval_set,
    maximally_incoherent_operations,
    trivial_effects,
    uniform_point
)
from src.robustness.states import free_base_norm, standard_robustness_state

logger = logging.getLogger(__name__)

THEOREMS = ("1", "2", "3", "4", "5", "6", "7", "8", "9", "monotones")
SUITES = ("classical", "quantum", "all")
RATIO_TOL = 1e-5
CHANNEL_TOL = 1e-4
ZERO_TOL = 1e-8
IDENTITY_TOL = 1e-6


@dataclass
class Check:
    """
    One verified statement.

    Attributes:
        name: What was checked
        value: Computed value
        expected: Reference value (None for pass/fail properties)
        tol: Allowed |value - expected|
        passed: Outcome
        details: Extra report fields
    """
    name: str
    value: float
    expected: Optional[float]
    tol: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def discrepancy(self) -> float:
        if self.expected is None:
            return 0.0
        if math.isinf(self.value) or math.isinf(self.expected):
            return 0.0 if self.value == self.expected else math.inf
        return abs(self.value - self.expected)

    def to_json(self) -> Dict[str, Any]:
        out = {"name": self.name, "value": self.value, "expected": self.expected,
               "tol": self.tol, "passed": self.passed, "discrepancy": self.discrepancy}
        if self.details:
            out["details"] = self.details
        return out


def close(name: str, value: float, expected: float, tol: float = RATIO_TOL, **details) -> Check:
    passed = abs(value - expected) <= tol if math.isfinite(value) else value == expected
    return Check(name, float(value), float(expected), tol, bool(passed), details)


def holds(name: str, passed: bool, value: float = 0.0, **details) -> Check:
    return Check(name, float(value), None, 0.0, bool(passed), details)


@dataclass
class SuiteReport:
    """
    Outcome of one verify run.

    Attributes:
        theorem: Suite key
        suite: "classical", "quantum" or "all"
        seed: Base seed; case k uses the generator seeded with (seed, k)
        checks: All checks in case order
    """
    theorem: str
    suite: str
    seed: int
    checks: List[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_discrepancy(self) -> float:
        return max((c.discrepancy for c in self.checks if c.expected is not None), default=0.0)

    def to_json(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "max_discrepancy": self.max_discrepancy,
            "failures": [c.name for c in self.checks if not c.passed],
            "checks": [c.to_json() for c in self.checks]
        }


Case = Callable[[np.random.Generator, int], List[Check]]


def _e(d: int, i: int) -> np.ndarray:
    return np.eye(d)[i]


def _maximally_coherent(d: int) -> np.ndarray:
    return ket_state(quantum_model(d), np.ones(d) / np.sqrt(d))


# Generalized robustness of states


def _state_classical(rng, n_tasks):
    checks = []
    for d in (2, 3, 4):
        model = classical_model(d)
        free = uniform_point(model)
        report = advantage_ratio_state(model, free, _e(d, 0))
        checks.append(close(f"classical d={d} point mass ratio", report.ratio, float(d),
                            robustness=report.robustness.value))
        sweep = sweep_state_tasks(model, free, _e(d, 0), n_tasks=n_tasks, rng=rng)
        checks.append(holds(f"classical d={d} random tasks below 1 + R", sweep.respects_bound,
                            sweep.max_ratio, bound=sweep.bound))
    return checks


def _state_quantum(rng, n_tasks):
    checks = []
    for d in (2, 3):
        model = quantum_model(d)
        free = diagonal_states(model)
        state = _maximally_coherent(d)
        report = advantage_ratio_state(model, free, state)
        checks.append(close(f"d={d} maximally coherent ratio", report.ratio, float(d),
                            robustness=report.robustness.value))
        if d == 2:
            sweep = sweep_state_tasks(model, free, state, n_tasks=n_tasks, rng=rng)
            checks.append(holds("qubit random tasks below 1 + R", sweep.respects_bound,
                                sweep.max_ratio, bound=sweep.bound))
    return checks


# Measurement informativeness


def _measurement_classical(rng, n_tasks):
    checks = []
    for d in (2, 3):
        model = classical_model(d)
        report = advantage_ratio_measurement(model, trivial_effects(model), Measurement.computational(model))
        checks.append(close(f"classical d={d} computational vs trivial ratio", report.ratio, float(d)))
    return checks


def _measurement_quantum(rng, n_tasks):
    checks = []
    for d in (2, 3):
        model = quantum_model(d)
        report = advantage_ratio_measurement(model, trivial_effects(model), Measurement.computational(model))
        checks.append(close(f"d={d} projective vs trivial ratio", report.ratio, float(d)))
    model = quantum_model(2)
    free = trivial_effects(model)
    worst = 0.0
    for _ in range(min(20, n_tasks)):
        report = advantage_ratio_measurement(model, free, random_measurement(model, 3, rng))
        worst = max(worst, report.discrepancy)
    checks.append(holds("random POVMs attain 1 + R", worst <= RATIO_TOL, worst))
    sweep = sweep_measurement_tasks(model, free, Measurement.computational(model), n_tasks=n_tasks, rng=rng)
    checks.append(holds("random ensembles below 1 + R", sweep.respects_bound, sweep.max_ratio, bound=sweep.bound))
    return checks


# Accessible information


def _accessible_classical(rng, n_tasks):
    model = classical_model(2)
    result = accessible_advantage(model, trivial_effects(model), Measurement.computational(model))
    return [close("classical d=2 accessible gain", result.gain, 1.0)]


def _accessible_quantum(rng, n_tasks):
    checks = []
    for d in (2, 3):
        model = quantum_model(d)
        free = trivial_effects(model)
        m = Measurement.computational(model)
        result = accessible_advantage(model, free, m)
        checks.append(close(f"d={d} accessible gain", result.gain, math.log2(d)))
        sweep = sweep_accessible_gain(model, free, m, n_ensembles=n_tasks, rng=rng, bound=result.predicted)
        checks.append(holds(f"d={d} random ensembles below log2(1 + R)", sweep.respects_bound,
                            sweep.max_gain, bound=sweep.bound))
    return checks


# Generating power


def _generating_classical(rng, n_tasks):
    model = classical_model(2)
    free = uniform_point(model)
    identity = Channel.identity(model)
    power = generating_power(model, model, free, free, identity)
    report = advantage_ratio_generating(model, model, free, free, replacer_channel(model, model, _e(2, 0)))
    return [close("identity has no generating power", power.value, 0.0, ZERO_TOL),
            close("replacer onto a point mass ratio", report.ratio, 2.0)]


def _generating_quantum(rng, n_tasks):
    model = quantum_model(2)
    free = diagonal_states(model)
    hadamard = unitary_channel(model, HADAMARD)
    report = advantage_ratio_generating(model, model, free, free, hadamard)
    free_power = generating_power(model, model, free, free, Channel.identity(model))
    return [close("Hadamard vs diagonal states ratio", report.ratio, 2.0),
            close("free channel has no generating power", free_power.value, 0.0, ZERO_TOL)]


# Channel robustness


def _channel_quantum(rng, n_tasks):
    checks = []
    for d in (2, 3):
        model = quantum_model(d)
        report = advantage_ratio_channel(ReplacerChannels(model, model), Channel.identity(model))
        checks.append(close(f"d={d} identity vs replacers ratio", report.ratio, float(d * d), CHANNEL_TOL))
    model = quantum_model(2)
    hadamard = unitary_channel(model, HADAMARD)
    free = diagonal_states(model)
    power = generating_power(model, model, free, free, hadamard).value
    robustness = channel_robustness(maximally_incoherent_operations(model), hadamard).value
    checks.append(close("generating power equals channel robustness under incoherent operations",
                        robustness, power, CHANNEL_TOL))
    sweep = sweep_channel_tasks(ReplacerChannels(model, model), Channel.identity(model), n_tasks=n_tasks, rng=rng)
    checks.append(holds("random channel tasks below 1 + R", sweep.respects_bound, sweep.max_ratio, bound=sweep.bound))
    return checks


def _channel_ensemble_quantum(rng, n_tasks):
    model = quantum_model(2)
    free = ReplacerChannels(model, model)
    identity = Channel.identity(model)
    replacer = replacer_channel(model, model, herm_to_vec(np.eye(2) / 2.0))
    forward = advantage_ratio_channel_ensemble(free, [0.5, 0.5], [identity, replacer])
    backward = advantage_ratio_channel_ensemble(free, [0.5, 0.5], [replacer, identity])
    return [close("ensemble ratio", forward.ratio, 4.0, CHANNEL_TOL),
            holds("ensemble argmax", forward.details.get("argmax") == 0, forward.details.get("argmax", -1)),
            holds("permuted ensemble keeps the ratio", forward.robustness.value == backward.robustness.value,
                  backward.robustness.value),
            holds("permuted ensemble moves the argmax", backward.details.get("argmax") == 1,
                  backward.details.get("argmax", -1))]


# Standard robustness


def _standard_classical(rng, n_tasks):
    model = classical_model(2)
    free = interval_set(model, 1.0 / 3.0, 2.0 / 3.0)
    state = _e(2, 0)
    checks = [close("interval gain ratio", gain_ratio_standard(model, model, free, state).ratio, 3.0)]
    divergent = gain_ratio_standard(model, model, uniform_point(model), state)
    checks.append(holds("divergent instance certified", divergent.certified
                        and divergent.details["free_gain"] <= 1e-9
                        and divergent.details["resource_gain"] >= 0.25,
                        divergent.details["resource_gain"], free_gain=divergent.details["free_gain"]))
    restricted = gain_ratio_standard(model, model, free, state, restriction=[Measurement.computational(model)])
    checks.append(close("restricted gain ratio", restricted.ratio, 3.0))
    worst = 0.0
    for _ in range(min(100, n_tasks)):
        x = random_state(model, rng)
        r = standard_robustness_state(model, free, x).value
        worst = max(worst, abs(1.0 + 2.0 * r - free_base_norm(model, free, x)))
    checks.append(holds("1 + 2R equals the free base norm", worst <= IDENTITY_TOL, worst))
    return checks


def _standard_quantum(rng, n_tasks):
    model = quantum_model(2)
    points = [bloch_state(model, s * 0.5 * np.eye(3)[k]) for k in range(3) for s in (1.0, -1.0)]
    free = GeneratorFreeSet(model, points, "octahedron")
    report = gain_ratio_standard(model, model, free, ket_state(model, [1.0, 0.0]))
    return [close("octahedron gain ratio matches 1 + 2R", report.ratio, report.predicted)]


# Convertibility


def _majorizes(p: np.ndarray, q: np.ndarray) -> bool:
    return bool(np.all(np.cumsum(np.sort(p)[::-1]) >= np.cumsum(np.sort(q)[::-1]) - 1e-9))


def _conversion_classical(rng, n_tasks):
    agree, witnessed, infeasible = 0, 0, 0
    for _ in range(n_tasks):
        d = int(rng.integers(2, 5))
        p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
        verdict = convertible_state(doubly_stochastic(d), p, q)
        agree += verdict.feasible == _majorizes(p, q)
        if not verdict.feasible:
            infeasible += 1
            witnessed += verdict.witness is not None and verdict.witness.margin > 0.0
    reverse = convertible_state(doubly_stochastic(2), [0.6, 0.4], [0.9, 0.1])
    return [holds("verdicts agree with majorization", agree == n_tasks, agree, pairs=n_tasks),
            holds("every infeasible verdict has a witness", witnessed == infeasible, witnessed,
                  infeasible=infeasible),
            close("flat to sharp witness margin", reverse.witness.margin if reverse.witness else 0.0, 0.3)]


def _conversion_quantum(rng, n_tasks):
    model = quantum_model(2)
    ops = unital_quantum(2)
    flat = herm_to_vec(np.diag([0.6, 0.4]))
    sharp = herm_to_vec(np.diag([0.9, 0.1]))
    down = convertible_state(ops, sharp, flat)
    up = convertible_state(ops, flat, sharp)
    return [holds("unital sharp to flat", down.feasible),
            holds("unital flat to sharp refused with witness",
                  not up.feasible and up.witness is not None and up.witness.margin > 0.0,
                  up.witness.margin if up.witness else 0.0)]


def _preprocessing_classical(rng, n_tasks):
    model = classical_model(2)
    ops = doubly_stochastic(2)
    sharp, flat = np.array([0.9, 0.1]), np.array([0.6, 0.4])
    channels = [Channel.identity(model), replacer_channel(model, model, [0.5, 0.5])]
    forward = preprocessing_sweep(sharp, flat, ops, channels, n_tasks=n_tasks, rng=rng)
    backward = preprocessing_sweep(flat, sharp, ops, channels, n_tasks=n_tasks, rng=rng)
    noise = detect_noise(sharp, flat, ops, replacer_channel(model, model, [0.5, 0.5]), n_tasks=n_tasks, rng=rng)
    return [holds("convertible pair never violates", forward.consistent and forward.violations == 0,
                  forward.max_violation),
            holds("non-convertible pair violates", backward.consistent and backward.violations > 0,
                  backward.max_violation),
            holds("noise detection consistent", noise.consistent, noise.max_violation)]


def _preprocessing_quantum(rng, n_tasks):
    model = quantum_model(2)
    ops = unital_quantum(2)
    sharp = herm_to_vec(np.diag([0.9, 0.1]))
    flat = herm_to_vec(np.diag([0.6, 0.4]))
    channels = [Channel.identity(model), replacer_channel(model, model, herm_to_vec(np.eye(2) / 2.0))]
    sweep = preprocessing_sweep(flat, sharp, ops, channels, n_tasks=min(n_tasks, 50), rng=rng)
    return [holds("unital non-convertible pair violates", sweep.consistent and sweep.violations > 0,
                  sweep.max_violation)]


def _monotones_classical(rng, n_tasks):
    ops = all_classical_channels(2)
    e1, e2 = _e(2, 0), _e(2, 1)
    swap = convertible_ensemble(ops, [e1, e2], [e2, e1], mode=CONCLUSIVE)
    split = convertible_ensemble(ops, [e1, e1], [e1, e2], mode=CONCLUSIVE)
    model = classical_model(2)
    m = Measurement.computational(model)
    coarse = Measurement(model, [model.unit_effect, np.zeros(2)])
    same = convertible_measurement(ops, m, m)
    coarsened = convertible_measurement(ops, m, coarse)
    return [holds("swap is feasible", swap.feasible),
            holds("splitting equal inputs is refused with witness",
                  not split.feasible and split.witness is not None and split.witness.margin > 0.0,
                  split.witness.margin if split.witness else 0.0),
            holds("measurement converts to itself", same.feasible),
            holds("post-processed measurement is reachable", coarsened.feasible)]


CASES: Dict[str, List[tuple]] = {
    "1": [("classical", _state_classical), ("quantum", _state_quantum)],
    "2": [("classical", _measurement_classical), ("quantum", _measurement_quantum)],
    "3": [("classical", _accessible_classical), ("quantum", _accessible_quantum)],
    "4": [("classical", _generating_classical), ("quantum", _generating_quantum)],
    "5": [("quantum", _channel_quantum)],
    "6": [("quantum", _channel_ensemble_quantum)],
    "7": [("classical", _standard_classical), ("quantum", _standard_quantum)],
    "8": [("classical", _conversion_classical), ("quantum", _conversion_quantum)],
    "9": [("classical", _preprocessing_classical), ("quantum", _preprocessing_quantum)],
    "monotones": [("classical", _monotones_classical), ("classical", _conversion_classical),
                  ("quantum", _conversion_quantum)]
}


def worker_count(default: int = 1) -> int:
    """Pool size from RF_THREADS (at least 1)."""
    raw = os.environ.get("RF_THREADS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring non-integer RF_THREADS=%r", raw)
        return default


def run_suite(
    theorem: str,
    suite: str = "all",
    seed: int = 1234,
    n_tasks: int = 300,
    workers: Optional[int] = None
) -> SuiteReport:
    """
    Run the certification cases of a theorem.

    Raises:
        ContractViolation: Unknown theorem or suite, or no case in the suite
    """
    if theorem not in CASES:
        raise ContractViolation(f"unknown theorem {theorem!r}; choose from {', '.join(THEOREMS)}")
    if suite not in SUITES:
        raise ContractViolation(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    cases: List[Case] = [fn for tag, fn in CASES[theorem] if suite == "all" or tag == suite]
    if not cases:
        raise ContractViolation(f"theorem {theorem} has no {suite} instances")
    workers = workers if workers is not None else worker_count()
    generators = [np.random.default_rng([seed, k]) for k in range(len(cases))]
    logger.info("verifying %s (%s suite): %d cases on %d workers", theorem, suite, len(cases), workers)
    if workers <= 1:
        results = [fn(rng, n_tasks) for fn, rng in zip(cases, generators)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, rng, n_tasks) for fn, rng in zip(cases, generators)]
            results = [f.result() for f in futures]
    checks = [c for group in results for c in group]
    report = SuiteReport(theorem, suite, seed, checks)
    for c in checks:
        if not c.passed:
            logger.warning("check failed: %s (value %.9g, expected %s)", c.name, c.value, c.expected)
    return report
