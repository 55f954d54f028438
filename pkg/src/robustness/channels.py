"""
Robustness of maps: robustness generating power over free states, channel
robustness over a free channel set and its ensemble version.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from src.core.types import ContractViolation, InternalError
from src.cones.psd import PsdCone
from src.gpt.channels import choi
from src.gpt.model import GptModel
from src.gpt.objects import Channel, clean_state
from src.solver.builder import ProgramBuilder
from src.solver.program import SolveStatus, SolverSettings
from .free_sets import FreeChannelSet, FreeStateSet
from .result import RobustnessResult
from .states import certificate_of, generalized_robustness_state

logger = logging.getLogger(__name__)

TIE_TOL = 1e-9


def argmax_lowest(values: Sequence[float], tol: float = TIE_TOL) -> int:
    """Index of the maximum; values within tol of it resolve to the lowest index."""
    best = max(values)
    if math.isinf(best):
        return next(i for i, v in enumerate(values) if v == best)
    return next(i for i, v in enumerate(values) if v >= best - tol * max(1.0, abs(best)))


def generating_power(
    model_in: GptModel,
    model_out: GptModel,
    free_in: FreeStateSet,
    free_out: FreeStateSet,
    channel: Channel,
    settings: Optional[SolverSettings] = None,
    epsilon: float = 1e-3,
    rng: Optional[np.random.Generator] = None
) -> RobustnessResult:
    """
    Robustness generating power P_F(L) = max over s in F of R_F'(L(s)).

    The objective is convex in s, so the maximum sits on an extreme point of
    F: generator sets are enumerated exactly, other sets through an
    epsilon-net whose estimated resolution is reported.

    Args:
        model_in: Input model
        model_out: Output model
        free_in: Free states F of the input
        free_out: Free states F' of the output
        channel: The map L
        settings: Solver settings
        epsilon: Target resolution of the net for non-polyhedral F
        rng: Generator used to build the net

    Returns:
        RobustnessResult with witness W*, details argmax, free_state (s*),
        net_size and net_resolution
    """
    if channel.model_in != model_in or channel.model_out != model_out:
        raise ContractViolation("channel models do not match the given models")
    points, resolution = free_in.net(epsilon, rng, settings=settings)
    if not free_in.polyhedral:
        points = [clean_state(model_in, p) for p in points]
    results: List[RobustnessResult] = []
    for s in points:
        image = clean_state(model_out, channel(s))
        results.append(generalized_robustness_state(model_out, free_out, image, settings))
    k = argmax_lowest([r.value for r in results])
    best = results[k]
    logger.info("robustness generating power %.9g at net point %d of %d", best.value, k, len(points))
    return RobustnessResult(
        "genpower",
        best.value,
        witness=best.witness,
        certificate=best.certificate,
        gap=best.gap,
        infeasibility=best.infeasibility,
        details={
            "argmax": k,
            "free_state": points[k],
            "net_size": len(points),
            "net_resolution": resolution
        }
    )


def channel_robustness(
    free: FreeChannelSet,
    channel: Channel,
    settings: Optional[SolverSettings] = None,
    slater: bool = False
) -> RobustnessResult:
    """
    Channel robustness R(L) = min { r : J_L <= (1 + r) J_X, X in O_F }.

    Solved as min t - 1 with (J, t) in cone(O_F) and J - J_L PSD. The witness
    Y is the multiplier of the PSD constraint: Y >= 0, Tr[Y J_X] <= 1 on O_F
    and Tr[Y J_L] = 1 + r.

    Raises:
        UnsupportedOperation: If the channel is not between quantum models
        InternalError: If the program is infeasible although O_F contains a
            full-rank Choi matrix
    """
    if channel.model_in.size != free.d_in or channel.model_out.size != free.d_out:
        raise ContractViolation("channel dimensions do not match the free channel set")
    j_lam = choi(channel)
    b = ProgramBuilder("channel robustness")
    j, t = free.add_choi_cone(b, "scaled free channel")
    b.add_conic({j: 1.0}, PsdCone(free.d_in * free.d_out), "domination", constant=-j_lam)
    b.set_objective({t: 1.0}, constant=-1.0)
    result = b.solve(settings)
    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        if free.interior:
            raise InternalError("channel robustness infeasible although O_F has a full-rank member")
        logger.info("channel robustness diverges for %s", free.name)
        return RobustnessResult("channel", math.inf, infeasibility=result.solution.z_dual)
    result.require("channel robustness")
    value = max(0.0, result.objective)
    logger.info("channel robustness %.9g against %s", value, free.name)
    return RobustnessResult(
        "channel",
        value,
        witness=result.multiplier("domination"),
        certificate=certificate_of(result, slater),
        gap=abs(result.objective - result.dual_objective),
        details={"free_choi": result.value(j) / max(1.0 + value, 1e-300)}
    )


def ensemble_channel_robustness(
    free: FreeChannelSet,
    probs: Sequence[float],
    channels: Sequence[Channel],
    settings: Optional[SolverSettings] = None
) -> RobustnessResult:
    """
    max_j R(L_j) over an ensemble {p_j, L_j} with every p_j > 0.

    Returns:
        RobustnessResult of the maximizing channel; details["argmax"] is the
        lowest maximizing index, details["values"] all channel robustnesses

    Raises:
        ContractViolation: If some p_j is zero, since the ensemble is assumed
            to give every channel positive weight
    """
    p = np.asarray(probs, dtype=float)
    if p.shape != (len(channels),) or len(channels) == 0:
        raise ContractViolation(f"{p.size} probabilities for {len(channels)} channels")
    if np.any(p <= 0.0):
        raise ContractViolation("channel ensembles must give every channel positive probability (p_i > 0)")
    if abs(float(np.sum(p)) - 1.0) > 1e-9:
        raise ContractViolation("ensemble probabilities must sum to 1")
    results = [channel_robustness(free, ch, settings) for ch in channels]
    values = [r.value for r in results]
    k = argmax_lowest(values)
    best = results[k]
    logger.info("ensemble channel robustness %.9g at index %d", best.value, k)
    return RobustnessResult(
        "ensemble_channel",
        best.value,
        witness=best.witness,
        certificate=best.certificate,
        gap=best.gap,
        infeasibility=best.infeasibility,
        details={"argmax": k, "values": values}
    )
