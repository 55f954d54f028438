"""
Conic program, solver settings, solution and certificate types.

Standard form (minimize convention):

    minimize    <c, x> + offset
    subject to  A x = b,   x in K

with K a ProductCone. The dual is

    maximize    <b, z> + offset
    subject to  c - A^T z = q,   q in K*

where z are the equality multipliers and q the cone multipliers.
"""

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.core.types import ContractViolation
from src.cones.product import ProductCone


class SolveStatus(enum.Enum):
    """Termination status of a solve."""
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    MAX_ITERATIONS = "max_iterations"


@dataclass(frozen=True)
class SolverSettings:
    """
    Numerical configuration of the conic solver.

    Attributes:
        gap_tol: Relative duality gap tolerance
        feas_tol: Relative primal and dual residual tolerance
        max_iters: Iteration budget
        scaling: Ruiz equilibration of the constraint matrix
        alpha: Over-relaxation parameter in (0, 2)
        check_every: Convergence test period in iterations
        trace_path: CSV file receiving (iter, primal_res, dual_res, gap) rows
    """
    gap_tol: float = 1e-7
    feas_tol: float = 1e-7
    max_iters: int = 50000
    scaling: bool = True
    alpha: float = 1.5
    check_every: int = 10
    trace_path: Optional[str] = None

    def __post_init__(self):
        if self.gap_tol <= 0 or self.feas_tol <= 0:
            raise ContractViolation("solver tolerances must be positive")
        if self.max_iters < 1:
            raise ContractViolation("max_iters must be positive")
        if not 0.0 < self.alpha < 2.0:
            raise ContractViolation("alpha must lie in (0, 2)")
        if self.check_every < 1:
            raise ContractViolation("check_every must be positive")

    @property
    def infeasibility_warmup(self) -> int:
        """Iterations before infeasibility certificates are examined."""
        return max(1000, self.max_iters // 10)


@dataclass
class ConicProgram:
    """
    A conic program in standard form.

    Attributes:
        objective: Cost vector c
        constraint_matrix: Dense matrix A, shape (m, n)
        rhs: Right-hand side b, length m
        cone: Variable cone K with ambient dimension n
        offset: Constant added to the objective
        row_labels: Optional name per equality row
    """
    objective: np.ndarray
    constraint_matrix: np.ndarray
    rhs: np.ndarray
    cone: ProductCone
    offset: float = 0.0
    row_labels: Optional[List[str]] = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        a = np.asarray(self.constraint_matrix, dtype=float)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, self.objective.shape[0])
        self.constraint_matrix = a
        n = self.objective.shape[0]
        if a.ndim != 2 or a.shape[1] != n:
            raise ContractViolation(
                f"constraint matrix has shape {a.shape}, expected (m, {n})"
            )
        if a.shape[0] != self.rhs.shape[0]:
            raise ContractViolation(
                f"constraint matrix has {a.shape[0]} rows but rhs has {self.rhs.shape[0]} entries"
            )
        if self.cone.ambient_dim != n:
            raise ContractViolation(
                f"cone dimension {self.cone.ambient_dim} does not match variable dimension {n}"
            )
        if self.row_labels is not None and len(self.row_labels) != a.shape[0]:
            raise ContractViolation("one label per constraint row is required")
        for name, arr in (("objective", self.objective), ("rhs", self.rhs), ("matrix", a)):
            if not np.all(np.isfinite(arr)):
                raise ContractViolation(f"program {name} contains NaN or Inf entries")

    @property
    def n_variables(self) -> int:
        return self.objective.shape[0]

    @property
    def n_constraints(self) -> int:
        return self.rhs.shape[0]

    def row_label(self, i: int) -> str:
        """Name of equality row i."""
        if self.row_labels is not None:
            return self.row_labels[i]
        return f"row {i}"


@dataclass
class Solution:
    """
    Result of a solve.

    Attributes:
        status: Termination status
        x_primal: Primal point (a ray when dual infeasible)
        z_dual: Equality multipliers (an improving ray when primal infeasible)
        q_dual: Cone multipliers c - A^T z, in K*
        primal_obj: <c, x> + offset
        dual_obj: <b, z> + offset
        gap: Relative duality gap
        primal_residual: Relative primal residual
        dual_residual: Relative dual residual
        iterations: Iterations performed
        log: Iteration rows (iter, primal_res, dual_res, gap)
    """
    status: SolveStatus
    x_primal: np.ndarray
    z_dual: np.ndarray
    q_dual: np.ndarray
    primal_obj: float
    dual_obj: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    log: List[Tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    @property
    def usable(self) -> bool:
        """Optimal, or stopped on the budget with residuals and gap below 1e-4."""
        if self.status is SolveStatus.OPTIMAL:
            return True
        return (
            self.status is SolveStatus.MAX_ITERATIONS
            and max(self.primal_residual, self.dual_residual, self.gap) <= 1e-4
        )


@dataclass(frozen=True)
class CertificateFailure:
    """
    A constraint that failed re-verification.

    Attributes:
        constraint: Row label, cone factor name or "duality gap"
        magnitude: Size of the violation
    """
    constraint: str
    magnitude: float


@dataclass
class Certificate:
    """
    Independent re-verification of a solution.

    Attributes:
        primal_residual: max |A x - b| recomputed in extended precision
        dual_residual: max |c - A^T z - q| recomputed in extended precision
        cone_violation: Largest cone violation of x
        dual_cone_violation: Largest dual-cone violation of q
        gap: |<c, x> - <b, z>|
        gap_ok: Whether the gap is within tolerance
        slater: Whether a strictly feasible point was found (None if undecided)
        slater_margin: Interior margin of the best point found
        failures: Every failed check
    """
    primal_residual: float
    dual_residual: float
    cone_violation: float
    dual_cone_violation: float
    gap: float
    gap_ok: bool
    slater: Optional[bool]
    slater_margin: float
    failures: List[CertificateFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "cone_violation": self.cone_violation,
            "dual_cone_violation": self.dual_cone_violation,
            "gap": self.gap,
            "gap_ok": self.gap_ok,
            "slater": self.slater,
            "slater_margin": self.slater_margin,
            "failures": [
                {"constraint": f.constraint, "magnitude": f.magnitude} for f in self.failures
            ]
        }

