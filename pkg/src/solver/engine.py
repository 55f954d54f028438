"""
Conic Solver Engine.

Operator-splitting solver for ConicProgram instances. The program is lowered
to the form

    minimize <c, x>  subject to  A x + s = b,  s in {0}^m x K

and solved by ADMM on the homogeneous self-dual embedding, alternating an
affine projection (one cached Cholesky factorization of I + A^T A) with
projections onto the cone factors. Generated cone factors are lifted to
generator coordinates so every projected block is an orthant or a PSD cone.
"""

import csv
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from src.core.types import AbstractCone, SolverFailure
from src.cones.orthant import OrthantCone
from src.cones.psd import PsdCone
from src.cones.generated import GeneratedCone
from src.cones.hermitian import hermitian_basis
from .program import ConicProgram, Solution, SolveStatus, SolverSettings

logger = logging.getLogger(__name__)


class _PsdBlockProjector:
    """Fast PSD projection on Hermitian coordinates of one block size."""

    def __init__(self, d: int):
        self.d = d
        self.basis = hermitian_basis(d)
        self.flat = self.basis.reshape(d * d, d * d)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        h = np.tensordot(x, self.basis, axes=(0, 0))
        w, v = np.linalg.eigh(h)
        if w[0] >= 0.0:
            return x
        w = np.maximum(w, 0.0)
        p = (v * w) @ v.conj().T
        # tr(B_k p) for every basis matrix
        return np.real(self.flat.conj() @ p.reshape(-1))


class ConicSolver:
    """
    ADMM solver for conic programs over products of orthant, PSD and
    generated cones.

    The solver owns all its workspace; a single instance solves one program
    at a time, distinct instances may run concurrently.

    Attributes:
        settings: Numerical configuration
        iterations: Iterations used by the last solve
        factorizations: Number of KKT factorizations performed
        log: Iteration rows (iter, primal_res, dual_res, gap) of the last solve
    """

    def __init__(self, settings: Optional[SolverSettings] = None):
        """
        Initialize the solver.

        Args:
            settings: Solver settings (defaults to SolverSettings())
        """
        self.settings = settings if settings is not None else SolverSettings()

        # Statistics tracking
        self.iterations = 0
        self.factorizations = 0
        self.log: List[Tuple[int, float, float, float]] = []

    def solve(self, program: ConicProgram) -> Solution:
        """
        Solve a conic program.

        Args:
            program: The program in standard form

        Returns:
            Solution with status, primal/dual points and residuals

        Raises:
            SolverFailure: On numerical breakdown (non-finite iterates or a
                failed factorization)
        """
        self.iterations = 0
        self.log = []
        lowered = _LoweredProgram(program)
        logger.debug(
            "solving conic program: %d variables (%d lifted), %d equality rows, %d cone rows",
            program.n_variables, lowered.n, program.n_constraints, lowered.k
        )
        return self._run(program, lowered)

    def _run(self, program: ConicProgram, lp: "_LoweredProgram") -> Solution:
        s = self.settings
        a, b, c = lp.a, lp.b, lp.c
        m_eq, n, k = lp.m_eq, lp.n, lp.k
        m = m_eq + k

        # Ruiz equilibration: a_hat = D a E; cone blocks get uniform row scales
        d_row = np.ones(m)
        e_col = np.ones(n)
        a_hat = a.copy()
        if s.scaling and a.size:
            for _ in range(25):
                row = np.sqrt(np.max(np.abs(a_hat), axis=1))
                col = np.sqrt(np.max(np.abs(a_hat), axis=0)) if m else np.ones(n)
                row = np.clip(np.where(row > 0, row, 1.0), 1e-4, 1e4)
                col = np.clip(np.where(col > 0, col, 1.0), 1e-4, 1e4)
                for start, stop in lp.psd_row_blocks:
                    row[start:stop] = np.exp(np.mean(np.log(row[start:stop])))
                d_row /= row
                e_col /= col
                a_hat = (a_hat / row[:, None]) / col[None, :]
        b_hat = d_row * b
        c_hat = e_col * c
        sigma_b = 1.0 / max(1.0, float(np.max(np.abs(b_hat))) if m else 1.0)
        sigma_c = 1.0 / max(1.0, float(np.max(np.abs(c_hat))) if n else 1.0)
        b_hat = b_hat * sigma_b
        c_hat = c_hat * sigma_c

        try:
            factor = cho_factor(np.eye(n) + a_hat.T @ a_hat)
        except LinAlgError as exc:
            raise SolverFailure(f"KKT factorization failed: {exc}") from exc
        self.factorizations += 1

        def solve_m(wx: np.ndarray, wy: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
            px = cho_solve(factor, wx - a_hat.T @ wy)
            return px, wy + a_hat @ px

        gx, gy = solve_m(c_hat, b_hat)
        h_g = float(c_hat @ gx + b_hat @ gy)

        u_x = np.zeros(n)
        u_y = np.zeros(m)
        u_t = 1.0
        v_x = np.zeros(n)
        v_y = np.zeros(m)
        v_t = 1.0

        warmup = s.infeasibility_warmup
        alpha = s.alpha
        trace_rows: List[Tuple[int, float, float, float]] = []
        status = SolveStatus.MAX_ITERATIONS
        it = 0
        last = None

        for it in range(1, s.max_iters + 1):
            # Affine projection: (I + Q) u_tilde = u + v
            wx = u_x + v_x
            wy = u_y + v_y
            wt = u_t + v_t
            px, py = solve_m(wx, wy)
            t_tilde = (wt + float(c_hat @ px + b_hat @ py)) / (1.0 + h_g)
            x_tilde = px - t_tilde * gx
            y_tilde = py - t_tilde * gy

            # Relaxed cone projection
            rx = alpha * x_tilde + (1 - alpha) * u_x - v_x
            ry = alpha * y_tilde + (1 - alpha) * u_y - v_y
            rt = alpha * t_tilde + (1 - alpha) * u_t - v_t
            new_y = lp.project_dual(ry)
            new_t = max(rt, 0.0)

            v_x = np.zeros_like(rx)
            v_y = new_y - ry
            v_t = new_t - rt
            u_x = rx
            u_y = new_y
            u_t = new_t

            if not (np.isfinite(u_t) and np.all(np.isfinite(u_y)) and np.all(np.isfinite(u_x))):
                raise SolverFailure("non-finite iterate encountered", log=trace_rows)

            if it % s.check_every and it != s.max_iters:
                continue

            # Unscaled iterates
            x_raw = e_col * u_x / sigma_b
            y_raw = d_row * u_y / sigma_c
            s_raw = v_y / d_row / sigma_b
            if u_t > 1e-12:
                x = x_raw / u_t
                y = y_raw / u_t
                sl = s_raw / u_t
                pres, dres, gap, pobj, dobj = lp.residuals(x, y, sl)
                row = (it, pres, dres, gap)
                trace_rows.append(row)
                if it % (s.check_every * 100) == 0:
                    logger.debug("iter %d pres %.3e dres %.3e gap %.3e", *row)
                last = (x, y, sl)
                if pres <= s.feas_tol and dres <= s.feas_tol and gap <= s.gap_tol:
                    status = SolveStatus.OPTIMAL
                    break
            if it >= warmup:
                cert = lp.infeasibility(x_raw, y_raw, s_raw, s.feas_tol)
                if cert is not None:
                    status = cert
                    last = (x_raw, y_raw, s_raw)
                    break

        self.iterations = it
        self.log = trace_rows
        if s.trace_path:
            self._write_trace(s.trace_path, trace_rows)

        if last is None:
            x_raw = e_col * u_x / sigma_b
            y_raw = d_row * u_y / sigma_c
            s_raw = v_y / d_row / sigma_b
            tau = max(u_t, 1e-12)
            last = (x_raw / tau, y_raw / tau, s_raw / tau)
        solution = lp.build_solution(program, status, *last, iterations=it, log=trace_rows)
        logger.debug(
            "solve finished: %s after %d iterations (obj %.9g, gap %.2e)",
            status.value, it, solution.primal_obj, solution.gap
        )
        return solution

    @staticmethod
    def _write_trace(path: str, rows: List[Tuple[int, float, float, float]]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["iter", "primal_res", "dual_res", "gap"])
            for it, p, d, g in rows:
                writer.writerow([it, repr(p), repr(d), repr(g)])


class _LoweredProgram:
    """
    A ConicProgram rewritten in the A x + s = b form with lifted generated cones.

    Attributes:
        lift: Matrix mapping lifted variables to original variables
        a, b, c: Lowered data
        m_eq: Number of equality rows
        n: Number of lifted variables
        k: Number of cone rows
    """

    def __init__(self, program: ConicProgram):
        cone = program.cone
        n_orig = program.n_variables
        lifted_dims = [cone.free_dim]
        self.blocks: List[Tuple[int, int, AbstractCone, Optional[_PsdBlockProjector]]] = []
        self.psd_row_blocks: List[Tuple[int, int]] = []
        self.factor_kinds: List[str] = []

        cols = [np.eye(n_orig)[:, :cone.free_dim]] if cone.free_dim else []
        pos = cone.free_dim
        for (start, stop, factor) in cone.blocks():
            size = stop - start
            if isinstance(factor, GeneratedCone):
                block = np.zeros((n_orig, factor.n_generators))
                block[start:stop, :] = factor.generators
                cols.append(block)
                lifted = OrthantCone(factor.n_generators)
                self.factor_kinds.append("generated")
            elif isinstance(factor, (OrthantCone, PsdCone)):
                block = np.zeros((n_orig, size))
                block[start:stop, :] = np.eye(size)
                cols.append(block)
                lifted = factor
                self.factor_kinds.append(factor.variant)
            else:
                raise SolverFailure(f"unsupported cone factor {factor!r}")
            lifted_size = lifted.ambient_dim
            projector = _PsdBlockProjector(lifted.d) if isinstance(lifted, PsdCone) else None
            self.blocks.append((pos, pos + lifted_size, lifted, projector))
            pos += lifted_size
            lifted_dims.append(lifted_size)

        self.lift = np.hstack(cols) if cols else np.zeros((n_orig, 0))
        self.n = self.lift.shape[1]
        self.free_dim = cone.free_dim
        self.m_eq = program.n_constraints
        self.k = self.n - self.free_dim

        a_eq = program.constraint_matrix @ self.lift
        a_cone = np.zeros((self.k, self.n))
        a_cone[:, self.free_dim:] = -np.eye(self.k)
        self.a = np.vstack([a_eq, a_cone])
        self.b = np.concatenate([program.rhs, np.zeros(self.k)])
        self.c = self.lift.T @ program.objective
        self.offset = program.offset
        for (start, stop, lifted, projector) in self.blocks:
            if projector is not None:
                row0 = self.m_eq + start - self.free_dim
                self.psd_row_blocks.append((row0, row0 + stop - start))

        self.norm_b = float(np.max(np.abs(self.b))) if self.b.size else 0.0
        self.norm_c = float(np.max(np.abs(self.c))) if self.c.size else 0.0

    def project_dual(self, y: np.ndarray) -> np.ndarray:
        """Project onto {free}^m_eq x K* (lifted factors are self-dual)."""
        out = y.copy()
        base = self.m_eq - self.free_dim
        for (start, stop, lifted, projector) in self.blocks:
            seg = out[base + start:base + stop]
            if projector is not None:
                out[base + start:base + stop] = projector(seg)
            else:
                np.maximum(seg, 0.0, out=seg)
        return out

    def residuals(self, x: np.ndarray, y: np.ndarray, s: np.ndarray):
        ax = self.a @ x
        aty = self.a.T @ y
        pres = np.max(np.abs(ax + s - self.b)) if self.b.size else 0.0
        pres /= 1.0 + max(self.norm_b, float(np.max(np.abs(ax))) if ax.size else 0.0,
                          float(np.max(np.abs(s))) if s.size else 0.0)
        dres = np.max(np.abs(aty + self.c)) if self.c.size else 0.0
        dres /= 1.0 + max(self.norm_c, float(np.max(np.abs(aty))) if aty.size else 0.0)
        pobj = float(self.c @ x)
        dobj = float(-self.b @ y)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        return float(pres), float(dres), float(gap), pobj, dobj

    def infeasibility(self, x: np.ndarray, y: np.ndarray, s: np.ndarray, tol: float):
        by = float(self.b @ y)
        if by < -1e-12:
            ratio = float(np.max(np.abs(self.a.T @ y))) / -by if self.n else 0.0
            if ratio <= tol:
                return SolveStatus.PRIMAL_INFEASIBLE
        cx = float(self.c @ x)
        if cx < -1e-12:
            ratio = float(np.max(np.abs(self.a @ x + s))) / -cx if self.a.size else 0.0
            if ratio <= tol:
                return SolveStatus.DUAL_INFEASIBLE
        return None

    def build_solution(
        self,
        program: ConicProgram,
        status: SolveStatus,
        x: np.ndarray,
        y: np.ndarray,
        s: np.ndarray,
        iterations: int,
        log: List[Tuple[int, float, float, float]]
    ) -> Solution:
        a_orig = program.constraint_matrix
        y_eq = y[:self.m_eq]
        y_cone = y[self.m_eq:]

        if status is SolveStatus.PRIMAL_INFEASIBLE:
            scale = -float(self.b @ y)
            z = -y_eq / scale
            q = -(a_orig.T @ z)
            x_orig = np.zeros(program.n_variables)
            return Solution(
                status=status, x_primal=x_orig, z_dual=z, q_dual=q,
                primal_obj=float("inf"), dual_obj=float("inf"), gap=float("inf"),
                primal_residual=float("inf"), dual_residual=0.0,
                iterations=iterations, log=log
            )
        if status is SolveStatus.DUAL_INFEASIBLE:
            scale = -float(self.c @ x)
            x_orig = self.lift @ (x / scale)
            return Solution(
                status=status, x_primal=x_orig, z_dual=np.zeros(self.m_eq),
                q_dual=np.zeros(program.n_variables),
                primal_obj=float("-inf"), dual_obj=float("-inf"), gap=float("inf"),
                primal_residual=0.0, dual_residual=float("inf"),
                iterations=iterations, log=log
            )

        z = -y_eq
        x_orig = self.lift @ x
        q = program.objective - a_orig.T @ z
        # Orthant and PSD factors take the projected multiplier, exactly in K*.
        # y_cone is indexed by lifted position; a generated factor occupies
        # n_generators lifted slots but only its ambient dim in the original.
        base = self.free_dim
        for (start, stop, _), (l_start, l_stop, _, _), kind in zip(
                program.cone.blocks(), self.blocks, self.factor_kinds):
            if kind != "generated":
                q[start:stop] = y_cone[l_start - base:l_stop - base]
        pres, dres, gap, pobj, dobj = self.residuals(x, y, s)
        return Solution(
            status=status,
            x_primal=x_orig,
            z_dual=z,
            q_dual=q,
            primal_obj=pobj + self.offset,
            dual_obj=dobj + self.offset,
            gap=gap,
            primal_residual=pres,
            dual_residual=dres,
            iterations=iterations,
            log=log
        )


def solve(program: ConicProgram, settings: Optional[SolverSettings] = None) -> Solution:
    """
    Solve a conic program with a fresh ConicSolver.

    Args:
        program: The program
        settings: Solver settings (defaults to SolverSettings())

    Returns:
        The Solution
    """
    return ConicSolver(settings).solve(program)
