import csv
import dataclasses
import itertools

import numpy as np
import pytest

from src.cones import GeneratedCone, OrthantCone, ProductCone, PsdCone, herm_to_vec, vec_to_herm
from src.core.types import ContractViolation
from src.solver import (
    ConicProgram,
    ConicSolver,
    ProgramBuilder,
    SolveStatus,
    SolverSettings,
    certify,
    dual_of,
    slater_check,
    solve
)


def _simplex_lp():
    """min x1 subject to x1 + x2 = 1, x >= 0."""
    return ConicProgram(
        objective=[1.0, 0.0],
        constraint_matrix=[[1.0, 1.0]],
        rhs=[1.0],
        cone=ProductCone(0, [OrthantCone(2)])
    )


def _trace_sdp():
    """min <diag(0, 1), X> subject to tr X = 1, X psd."""
    return ConicProgram(
        objective=herm_to_vec(np.diag([0.0, 1.0])),
        constraint_matrix=herm_to_vec(np.eye(2)).reshape(1, -1),
        rhs=[1.0],
        cone=ProductCone(0, [PsdCone(2)])
    )


def _random_standard_lp(rng, m=2, n=4):
    a = rng.normal(size=(m, n))
    b = a @ rng.uniform(0.5, 1.5, size=n)
    c = rng.uniform(0.1, 2.0, size=n)
    return a, b, c


def _vertex_optimum(a, b, c):
    m, n = a.shape
    best = np.inf
    for cols in itertools.combinations(range(n), m):
        basis = a[:, cols]
        if abs(np.linalg.det(basis)) < 1e-10:
            continue
        x_b = np.linalg.solve(basis, b)
        if np.all(x_b >= -1e-12):
            best = min(best, float(c[list(cols)] @ x_b))
    return best


class TestSolve:

    def test_simplex_lp(self):
        sol = solve(_simplex_lp())
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(0.0, abs=1e-6)
        np.testing.assert_allclose(sol.x_primal, [0.0, 1.0], atol=1e-6)
        assert sol.gap <= 1e-6

    def test_trace_sdp(self):
        sol = ConicSolver().solve(_trace_sdp())
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(0.0, abs=1e-6)
        np.testing.assert_allclose(vec_to_herm(sol.x_primal), np.diag([1.0, 0.0]), atol=1e-5)

    def test_primal_infeasible(self):
        # t u - e1 = lambda u has no solution
        u = np.array([1.0, 1.0])
        builder = ProgramBuilder("infeasible")
        t = builder.add_variable("t", 1)
        builder.add_conic({t: u.reshape(-1, 1)}, GeneratedCone([u], warn_degenerate=False), "shift",
                          constant=np.array([-1.0, 0.0]))
        builder.set_objective({t: 1.0})
        result = builder.solve()
        assert result.status is SolveStatus.PRIMAL_INFEASIBLE

    def test_ray_through_generated_cone_infeasible(self):
        # t u - w = e1 with w on the ray of u
        cone = ProductCone(1, [GeneratedCone([[0.5, 0.5]], warn_degenerate=False)])
        program = ConicProgram(objective=[1.0, 0.0, 0.0], constraint_matrix=[[0.5, -1.0, 0.0], [0.5, 0.0, -1.0]],
                               rhs=[1.0, 0.0], cone=cone)
        assert solve(program).status is SolveStatus.PRIMAL_INFEASIBLE

    def test_psd_multiplier_after_generated_factor(self):
        # three generators in dimension two shift every later lifted slot by one
        cone = ProductCone(0, [GeneratedCone([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), PsdCone(2)])
        a = np.zeros((3, 6))
        a[0, 0] = 1.0
        a[1, 1] = 1.0
        a[2, 2:] = herm_to_vec(np.eye(2))
        c = np.concatenate([[0.0, 0.0], herm_to_vec(np.diag([0.0, 1.0]))])
        program = ConicProgram(c, a, [1.0, 1.0, 1.0], cone)
        sol = solve(program)
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.primal_obj == pytest.approx(0.0, abs=1e-6)
        np.testing.assert_allclose(vec_to_herm(sol.x_primal[2:]), np.diag([1.0, 0.0]), atol=1e-5)
        np.testing.assert_allclose(vec_to_herm(sol.q_dual[2:]), np.diag([0.0, 1.0]), atol=1e-5)
        np.testing.assert_allclose(sol.q_dual[:2], [0.0, 0.0], atol=1e-5)
        assert certify(program, sol, check_slater=False).passed

    def test_dual_infeasible(self):
        # min -x subject to x >= 0 is unbounded
        program = ConicProgram(objective=[-1.0], constraint_matrix=np.zeros((0, 1)), rhs=[],
                               cone=ProductCone(0, [OrthantCone(1)]))
        assert solve(program).status is SolveStatus.DUAL_INFEASIBLE

    def test_trace_file(self, tmp_path):
        path = tmp_path / "trace.csv"
        solve(_simplex_lp(), SolverSettings(trace_path=str(path)))
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["iter", "primal_res", "dual_res", "gap"]
        assert len(rows) > 1

    @pytest.mark.slow
    def test_matches_vertex_enumeration(self, rng):
        for _ in range(20):
            a, b, c = _random_standard_lp(rng)
            program = ConicProgram(c, a, b, ProductCone(0, [OrthantCone(a.shape[1])]))
            sol = solve(program)
            assert sol.status is SolveStatus.OPTIMAL
            assert sol.primal_obj == pytest.approx(_vertex_optimum(a, b, c), abs=1e-6)


class TestProgramValidation:

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolation):
            ConicProgram([1.0, 0.0], [[1.0, 1.0, 1.0]], [1.0], ProductCone(0, [OrthantCone(2)]))

    def test_non_finite(self):
        with pytest.raises(ContractViolation):
            ConicProgram([np.nan, 0.0], [[1.0, 1.0]], [1.0], ProductCone(0, [OrthantCone(2)]))

    def test_row_labels(self):
        assert _simplex_lp().row_label(0) == "row 0"

    @pytest.mark.parametrize("kwargs", [{"gap_tol": 0.0}, {"max_iters": 0}, {"alpha": 2.0}, {"check_every": 0}])
    def test_invalid_settings(self, kwargs):
        with pytest.raises(ContractViolation):
            SolverSettings(**kwargs)


class TestDuality:

    def test_simplex_dual_optimum(self):
        sol = solve(dual_of(_simplex_lp()))
        assert sol.status is SolveStatus.OPTIMAL
        assert -sol.primal_obj == pytest.approx(0.0, abs=1e-6)

    def test_sdp_dual_optimum(self):
        sol = solve(dual_of(_trace_sdp()))
        assert sol.status is SolveStatus.OPTIMAL
        assert -sol.primal_obj == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.slow
    def test_dual_of_dual(self, rng):
        for _ in range(10):
            a, b, c = _random_standard_lp(rng)
            program = ConicProgram(c, a, b, ProductCone(0, [OrthantCone(a.shape[1])]))
            primal = solve(program).primal_obj
            assert solve(dual_of(dual_of(program))).primal_obj == pytest.approx(primal, abs=1e-6)


class TestCertify:

    def test_optimal_solution_passes(self):
        program = _simplex_lp()
        cert = certify(program, solve(program))
        assert cert.passed
        assert cert.gap_ok
        assert cert.primal_residual <= 1e-6

    def test_perturbed_solution_fails_on_row(self):
        program = _simplex_lp()
        sol = solve(program)
        x = sol.x_primal.copy()
        x[0] += 1e-3
        cert = certify(program, dataclasses.replace(sol, x_primal=x), check_slater=False)
        assert not cert.passed
        assert "row 0" in [f.constraint for f in cert.failures]

    def test_unusable_solution_rejected(self):
        program = ConicProgram(objective=[-1.0], constraint_matrix=np.zeros((0, 1)), rhs=[],
                               cone=ProductCone(0, [OrthantCone(1)]))
        with pytest.raises(ContractViolation):
            certify(program, solve(program))

    def test_slater(self):
        slater, margin = slater_check(_simplex_lp())
        assert slater
        assert margin > 1e-6

    def test_slater_fails_without_interior(self):
        # tr X = 1 with X_00 = 0 leaves only diag(0, 1)
        a = np.vstack([herm_to_vec(np.diag([1.0, 0.0])), herm_to_vec(np.eye(2))])
        program = ConicProgram(herm_to_vec(np.diag([0.0, 1.0])), a, [0.0, 1.0], ProductCone(0, [PsdCone(2)]))
        slater, margin = slater_check(program)
        assert slater is False
        assert margin <= 1e-6


class TestProgramBuilder:

    def test_maximize_with_bound(self):
        builder = ProgramBuilder("bound")
        x = builder.add_variable("x", 1)
        builder.add_conic({x: -1.0}, OrthantCone(1), "x <= 1", constant=1.0)
        builder.set_objective({x: 1.0}, maximize=True)
        result = builder.solve().require("bound")
        assert result.objective == pytest.approx(1.0, abs=1e-6)
        assert result.scalar(x) == pytest.approx(1.0, abs=1e-6)
        assert result.multiplier("x <= 1")[0] == pytest.approx(1.0, abs=1e-5)

    def test_equality_multiplier(self):
        builder = ProgramBuilder("mix")
        p = builder.add_variable("p", 2, OrthantCone(2))
        builder.add_equality({p: np.ones(2)}, 1.0, "normalization")
        builder.set_objective({p: np.array([2.0, 3.0])})
        result = builder.solve().require("mix")
        assert result.objective == pytest.approx(2.0, abs=1e-6)
        np.testing.assert_allclose(result.value(p), [1.0, 0.0], atol=1e-5)
        assert result.multiplier("normalization")[0] == pytest.approx(2.0, abs=1e-5)

    def test_duplicate_names(self):
        builder = ProgramBuilder()
        x = builder.add_variable("x", 1)
        with pytest.raises(ContractViolation):
            builder.add_variable("x", 2)
        builder.add_equality({x: 1.0}, 0.0, "c")
        with pytest.raises(ContractViolation):
            builder.add_equality({x: 1.0}, 0.0, "c")

    def test_cone_dimension_checked(self):
        with pytest.raises(ContractViolation):
            ProgramBuilder().add_variable("rho", 3, PsdCone(2))
