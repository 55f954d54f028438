"""
Independent re-verification of solver output.

Residuals are recomputed from the program data in extended precision; every
violated equality row, cone factor and the duality gap are reported by name.
A Slater heuristic looks for a strictly feasible primal point.
"""

import logging
from typing import List, Optional

import numpy as np

from src.core.types import ContractViolation
from src.cones.product import ProductCone
from src.cones.orthant import OrthantCone
from .program import (
    Certificate,
    CertificateFailure,
    ConicProgram,
    Solution,
    SolveStatus,
    SolverSettings
)
from .engine import solve

logger = logging.getLogger(__name__)

SLATER_MARGIN = 1e-6


def certify(
    program: ConicProgram,
    solution: Solution,
    tol: float = 1e-6,
    gap_tol: float = 1e-6,
    check_slater: bool = True,
    settings: Optional[SolverSettings] = None
) -> Certificate:
    """
    Re-verify an optimal solution.

    Args:
        program: The solved program
        solution: Its solution (status Optimal, or a usable MaxIterations)
        tol: Relative feasibility tolerance for rows and cone factors
        gap_tol: Relative tolerance on the duality gap
        check_slater: Run the strict-feasibility search
        settings: Settings for the auxiliary Slater program

    Returns:
        Certificate listing every failed check

    Raises:
        ContractViolation: If the solution is not (near) optimal
    """
    if not solution.usable:
        raise ContractViolation(
            f"only optimal solutions can be certified, got status {solution.status.value}"
        )

    ld = np.longdouble
    a = program.constraint_matrix.astype(ld)
    b = program.rhs.astype(ld)
    c = program.objective.astype(ld)
    x = np.asarray(solution.x_primal).astype(ld)
    z = np.asarray(solution.z_dual).astype(ld)
    q = np.asarray(solution.q_dual).astype(ld)
    failures: List[CertificateFailure] = []

    # Primal rows
    row_res = np.abs(a @ x - b)
    scale = 1.0 + float(np.max(np.abs(b))) if b.size else 1.0
    for i in np.flatnonzero(row_res > tol * scale):
        failures.append(CertificateFailure(program.row_label(int(i)), float(row_res[i])))
    primal_residual = float(np.max(row_res)) if row_res.size else 0.0

    # Dual stationarity
    dual_res = np.abs(c - a.T @ z - q)
    dual_scale = 1.0 + float(np.max(np.abs(c))) if c.size else 1.0
    dual_residual = float(np.max(dual_res)) if dual_res.size else 0.0
    if dual_residual > tol * dual_scale:
        failures.append(CertificateFailure("dual stationarity", dual_residual))

    # Cone factors
    cone = program.cone
    x64 = x.astype(float)
    q64 = q.astype(float)
    cone_violation = 0.0
    dual_cone_violation = 0.0
    free_q = np.abs(q64[:cone.free_dim])
    if free_q.size and float(np.max(free_q)) > tol * dual_scale:
        failures.append(CertificateFailure("dual free block", float(np.max(free_q))))
        dual_cone_violation = float(np.max(free_q))
    for (s, t, factor), name in zip(cone.blocks(), cone.names):
        v = factor.violation(x64[s:t])
        cone_violation = max(cone_violation, v)
        if v > tol * max(1.0, float(np.linalg.norm(x64[s:t]))):
            failures.append(CertificateFailure(name, v))
        dv = factor.dual_violation(q64[s:t])
        dual_cone_violation = max(dual_cone_violation, dv)
        if dv > tol * max(1.0, float(np.linalg.norm(q64[s:t]))):
            failures.append(CertificateFailure(f"dual {name}", dv))

    # Duality gap
    pobj = float(c @ x)
    dobj = float(b @ z)
    gap = abs(pobj - dobj)
    gap_ok = gap <= gap_tol * (1.0 + abs(pobj) + abs(dobj))
    if not gap_ok:
        failures.append(CertificateFailure("duality gap", gap))

    slater: Optional[bool] = None
    margin = float("nan")
    if check_slater:
        slater, margin = slater_check(program, settings)

    if failures:
        logger.info(
            "certificate failed on %s",
            ", ".join(f.constraint for f in failures)
        )
    return Certificate(
        primal_residual=primal_residual,
        dual_residual=dual_residual,
        cone_violation=cone_violation,
        dual_cone_violation=dual_cone_violation,
        gap=gap,
        gap_ok=gap_ok,
        slater=slater,
        slater_margin=margin,
        failures=failures
    )


def slater_check(program: ConicProgram, settings: Optional[SolverSettings] = None):
    """
    Search for a strictly feasible point of the primal.

    Solves max t s.t. A x = b, x_b - t e_b in K_b for every factor, t <= 1,
    with e_b the factor's reference interior point.

    Returns:
        Tuple (slater, margin): slater is True when margin > 1e-6, False when
        the margin is not positive or the program is infeasible, None when the
        auxiliary solve did not terminate usefully
    """
    cone = program.cone
    blocks = cone.blocks()
    if not blocks:
        return True, float("inf")

    n = program.n_variables
    a = program.constraint_matrix
    # Variables: [x_free, t | y_1 .. y_p, u]
    f = cone.free_dim
    n_aux = n + 2
    e = np.zeros(n)
    for (s, t, factor) in blocks:
        e[s:t] = factor.interior_point()

    rows = np.zeros((program.n_constraints + 1, n_aux))
    rows[:-1, :f] = a[:, :f]
    rows[:-1, f] = a @ e
    rows[:-1, f + 1:f + 1 + n - f] = a[:, f:]
    rows[-1, f] = 1.0
    rows[-1, -1] = 1.0
    rhs = np.concatenate([program.rhs, [1.0]])
    objective = np.zeros(n_aux)
    objective[f] = -1.0
    aux_cone = ProductCone(f + 1, list(cone.factors) + [OrthantCone(1)],
                           list(cone.names) + ["t <= 1"])
    aux = ConicProgram(objective, rows, rhs, aux_cone)

    base = settings if settings is not None else SolverSettings()
    result = solve(aux, base)
    if result.status is SolveStatus.PRIMAL_INFEASIBLE:
        return False, float("-inf")
    if not result.usable:
        return None, float("nan")
    margin = float(result.x_primal[f])
    return margin > SLATER_MARGIN, margin
