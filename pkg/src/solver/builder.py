"""
Program Builder.

Assemble conic programs from named vector variables and named constraints,
lower them to a ConicProgram and read values and multipliers back.

Multiplier convention (always stated for the minimization form; a maximize
objective is handled as minimize -objective):

    minimize <c, v> + c0
    subject to  sum_k A_k v_k = rhs                      (multiplier z, free)
                sum_k A_k v_k + b in K                   (multiplier mu in K*)
                sum_k A_k v_k + b in K*                  (multiplier mu in K)

with stationarity c = sum A_k^T z + sum A_k^T mu + q_v, q_v in the dual of
each variable's own cone.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Union

import numpy as np

from src.core.types import AbstractCone, ContractViolation, SolverFailure
from src.cones.generated import GeneratedCone
from src.cones.orthant import OrthantCone
from src.cones.product import ProductCone
from .program import ConicProgram, Solution, SolveStatus, SolverSettings
from .engine import ConicSolver

logger = logging.getLogger(__name__)

Coefficient = Union[float, int, np.ndarray]


@dataclass(frozen=True)
class Variable:
    """
    A named block of program variables.

    Attributes:
        name: Unique name
        dim: Number of coordinates
        cone: Cone the block lives in (None for free variables)
        index: Creation order
    """
    name: str
    dim: int
    cone: Optional[AbstractCone]
    index: int


@dataclass
class _Constraint:
    label: str
    kind: str  # "eq" | "cone" | "dual"
    terms: Dict[Variable, np.ndarray]
    constant: np.ndarray
    cone: Optional[AbstractCone]
    slack: Optional[Variable] = None


class ProgramBuilder:
    """
    Incremental builder for conic programs.

    Attributes:
        variables: Declared variables in creation order
        constraints: Declared constraints in creation order
    """

    def __init__(self, name: str = "program"):
        self.name = name
        self.variables: List[Variable] = []
        self.constraints: List[_Constraint] = []
        self._names: Dict[str, Variable] = {}
        self._objective: Dict[Variable, np.ndarray] = {}
        self._constant = 0.0
        self._maximize = False

    def add_variable(self, name: str, dim: int, cone: Optional[AbstractCone] = None) -> Variable:
        """
        Declare a variable block.

        Args:
            name: Unique name
            dim: Number of coordinates
            cone: Cone constraint on the block, or None for a free block

        Returns:
            The Variable handle
        """
        if name in self._names:
            raise ContractViolation(f"variable {name!r} declared twice")
        if dim < 1:
            raise ContractViolation(f"variable {name!r} needs a positive dimension")
        if cone is not None and cone.ambient_dim != dim:
            raise ContractViolation(
                f"variable {name!r} has dimension {dim} but its cone has {cone.ambient_dim}"
            )
        var = Variable(name, int(dim), cone, len(self.variables))
        self.variables.append(var)
        self._names[name] = var
        return var

    def add_equality(
        self,
        terms: Mapping[Variable, Coefficient],
        rhs: Union[float, np.ndarray],
        label: str
    ) -> str:
        """
        Add sum_k A_k v_k = rhs.

        Returns:
            The constraint label
        """
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        self._add(label, "eq", terms, -rhs, None)
        return label

    def add_conic(
        self,
        terms: Mapping[Variable, Coefficient],
        cone: AbstractCone,
        label: str,
        constant: Optional[Union[float, np.ndarray]] = None
    ) -> str:
        """Add sum_k A_k v_k + constant in cone."""
        const = self._constant_vector(constant, cone.ambient_dim)
        self._add(label, "cone", terms, const, cone)
        return label

    def add_dual_conic(
        self,
        terms: Mapping[Variable, Coefficient],
        cone: AbstractCone,
        label: str,
        constant: Optional[Union[float, np.ndarray]] = None
    ) -> str:
        """Add sum_k A_k v_k + constant in the dual of cone."""
        const = self._constant_vector(constant, cone.ambient_dim)
        self._add(label, "dual", terms, const, cone)
        return label

    def set_objective(
        self,
        terms: Mapping[Variable, Coefficient],
        constant: float = 0.0,
        maximize: bool = False
    ) -> None:
        """
        Set the linear objective sum_k <c_k, v_k> + constant.

        Coefficients are vectors of the variable's dimension or scalars
        (broadcast).
        """
        self._objective = {}
        for var, coef in terms.items():
            vec = np.broadcast_to(np.asarray(coef, dtype=float), (var.dim,)).copy()
            self._objective[var] = vec
        self._constant = float(constant)
        self._maximize = bool(maximize)

    def build(self) -> ConicProgram:
        """
        Lower to a ConicProgram.

        Layout: free variables first, then cone variables, then constraint
        slacks, each in declaration order.
        """
        self._layout()
        n = self._n
        objective = np.zeros(n)
        sign = -1.0 if self._maximize else 1.0
        for var, vec in self._objective.items():
            objective[self._offset[var]:self._offset[var] + var.dim] = sign * vec

        rows: List[np.ndarray] = []
        rhs: List[np.ndarray] = []
        labels: List[str] = []
        self._row_ranges: Dict[str, slice] = {}
        for con in self.constraints:
            block, const = self._lower(con)
            start = sum(r.shape[0] for r in rows)
            rows.append(block)
            rhs.append(-const)
            self._row_ranges[con.label] = slice(start, start + block.shape[0])
            if block.shape[0] == 1:
                labels.append(con.label)
            else:
                labels.extend(f"{con.label}[{i}]" for i in range(block.shape[0]))
        matrix = np.vstack(rows) if rows else np.zeros((0, n))
        vector = np.concatenate(rhs) if rhs else np.zeros(0)
        return ConicProgram(
            objective=objective,
            constraint_matrix=matrix,
            rhs=vector,
            cone=self._cone,
            offset=sign * self._constant,
            row_labels=labels
        )

    def solve(self, settings: Optional[SolverSettings] = None) -> "BuiltSolution":
        """
        Build and solve.

        Args:
            settings: Solver settings

        Returns:
            BuiltSolution wrapping the raw Solution
        """
        program = self.build()
        solver = ConicSolver(settings)
        solution = solver.solve(program)
        return BuiltSolution(self, program, solution)

    # internals

    def _constant_vector(self, constant, dim: int) -> np.ndarray:
        if constant is None:
            return np.zeros(dim)
        return np.broadcast_to(np.asarray(constant, dtype=float), (dim,)).copy()

    def _add(self, label, kind, terms, constant, cone) -> None:
        if any(c.label == label for c in self.constraints):
            raise ContractViolation(f"constraint {label!r} declared twice")
        rows = constant.shape[0]
        matrices: Dict[Variable, np.ndarray] = {}
        for var, coef in terms.items():
            if var.name not in self._names or self._names[var.name] != var:
                raise ContractViolation(f"variable {var.name!r} does not belong to {self.name}")
            matrices[var] = _coefficient_matrix(coef, rows, var, label)
        con = _Constraint(label, kind, matrices, constant, cone)
        if kind != "eq":
            slack_cone = cone
            if kind == "dual" and isinstance(cone, GeneratedCone):
                slack_cone = OrthantCone(cone.n_generators)
            con.slack = Variable(f"{label}/slack", slack_cone.ambient_dim, slack_cone, -1 - len(self.constraints))
        self.constraints.append(con)

    def _layout(self) -> None:
        self._offset: Dict[Variable, int] = {}
        pos = 0
        free = [v for v in self.variables if v.cone is None]
        coned = [v for v in self.variables if v.cone is not None]
        for v in free:
            self._offset[v] = pos
            pos += v.dim
        free_dim = pos
        factors: List[AbstractCone] = []
        names: List[str] = []
        for v in coned:
            self._offset[v] = pos
            pos += v.dim
            factors.append(v.cone)
            names.append(v.name)
        for con in self.constraints:
            if con.slack is not None:
                self._offset[con.slack] = pos
                pos += con.slack.dim
                factors.append(con.slack.cone)
                names.append(con.label)
        self._n = pos
        self._cone = ProductCone(free_dim, factors, names)

    def _lower(self, con: _Constraint):
        rows = con.constant.shape[0]
        block = np.zeros((rows, self._n))
        for var, mat in con.terms.items():
            o = self._offset[var]
            block[:, o:o + var.dim] += mat
        const = con.constant
        if con.kind == "dual" and isinstance(con.cone, GeneratedCone):
            g_t = con.cone.generators.T
            block = g_t @ block
            const = g_t @ const
        if con.slack is not None:
            o = self._offset[con.slack]
            block[:, o:o + con.slack.dim] -= np.eye(con.slack.dim)
        return block, const


def _coefficient_matrix(coef: Coefficient, rows: int, var: Variable, label: str) -> np.ndarray:
    arr = np.asarray(coef, dtype=float)
    if arr.ndim == 0:
        if rows != var.dim:
            raise ContractViolation(
                f"scalar coefficient of {var.name!r} in {label!r} needs {rows} == {var.dim}"
            )
        return float(arr) * np.eye(rows)
    if arr.ndim == 1:
        if rows == 1 and arr.shape[0] == var.dim:
            return arr.reshape(1, -1)
        if var.dim == 1 and arr.shape[0] == rows:
            return arr.reshape(-1, 1)
    if arr.ndim == 2 and arr.shape == (rows, var.dim):
        return arr
    raise ContractViolation(
        f"coefficient of {var.name!r} in {label!r} has shape {arr.shape}, expected ({rows}, {var.dim})"
    )


class BuiltSolution:
    """
    Solution of a builder program, addressed by variable and constraint.

    Attributes:
        program: The lowered program
        solution: The raw solver Solution
    """

    def __init__(self, builder: ProgramBuilder, program: ConicProgram, solution: Solution):
        self._builder = builder
        self.program = program
        self.solution = solution
        self._sign = -1.0 if builder._maximize else 1.0

    @property
    def status(self) -> SolveStatus:
        return self.solution.status

    @property
    def objective(self) -> float:
        """Primal objective in the declared sense."""
        return self._sign * self.solution.primal_obj

    @property
    def dual_objective(self) -> float:
        """Dual objective in the declared sense."""
        return self._sign * self.solution.dual_obj

    def value(self, var: Variable) -> np.ndarray:
        o = self._builder._offset[var]
        return self.solution.x_primal[o:o + var.dim].copy()

    def scalar(self, var: Variable) -> float:
        return float(self.value(var)[0])

    def multiplier(self, label: str) -> np.ndarray:
        """
        Lagrange multiplier of a constraint in the minimization form.

        Equality rows give z; conic rows give mu in K*; dual-conic rows give
        mu in K (mapped through the generators for generated cones).
        """
        con = next((c for c in self._builder.constraints if c.label == label), None)
        if con is None:
            raise ContractViolation(f"unknown constraint {label!r}")
        if con.slack is None:
            return self.solution.z_dual[self._builder._row_ranges[label]].copy()
        o = self._builder._offset[con.slack]
        mu = self.solution.q_dual[o:o + con.slack.dim].copy()
        if con.kind == "dual" and isinstance(con.cone, GeneratedCone):
            return con.cone.generators @ mu
        return mu

    def require(self, context: str) -> "BuiltSolution":
        """
        Demand a usable optimum.

        Raises:
            SolverFailure: If the solve is infeasible, unbounded or inaccurate
        """
        if self.solution.usable:
            if not self.solution.is_optimal:
                logger.warning(
                    "%s: accepting inaccurate solve (pres %.2e, dres %.2e, gap %.2e)",
                    context, self.solution.primal_residual, self.solution.dual_residual,
                    self.solution.gap
                )
            return self
        raise SolverFailure(
            f"{context}: solver returned {self.solution.status.value}",
            log=self.solution.log,
            solution=self.solution
        )
