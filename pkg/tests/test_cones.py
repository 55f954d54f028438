import logging

import numpy as np
import pytest

from src.cones import (
    GeneratedCone,
    OrthantCone,
    ProductCone,
    PsdCone,
    cone_from_json,
    cone_to_json,
    dual_member,
    member,
    project
)
from src.cones.hermitian import hermitian_basis, herm_to_vec, linear_map_matrix, vec_to_herm
from src.core.types import ContractViolation, ModelError, UnsupportedOperation

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


def _psd_vec(m):
    return herm_to_vec(np.asarray(m, dtype=complex))


class TestMember:

    def test_orthant_basis_vector(self):
        assert member(OrthantCone(2), np.array([1.0, 0.0]), 1e-9)

    def test_orthant_rejects_negative_entry(self):
        assert not member(OrthantCone(2), np.array([1.0, -1e-3]))

    def test_psd_rejects_indefinite(self):
        assert not member(PsdCone(2), _psd_vec([[1, 2], [2, 1]]), 1e-9)

    def test_psd_accepts_density_matrix(self):
        assert member(PsdCone(2), _psd_vec([[0.5, 0.5], [0.5, 0.5]]))

    def test_generated_cone_combination(self):
        cone = GeneratedCone([[1.0, 0.0], [1.0, 1.0]])
        assert member(cone, np.array([2.0, 1.0]), 1e-9)

    def test_generated_cone_outside(self):
        cone = GeneratedCone([[1.0, 0.0], [1.0, 1.0]])
        assert not member(cone, np.array([0.0, 1.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            member(OrthantCone(3), np.array([1.0, 0.0]))

    def test_nan_rejected(self):
        with pytest.raises(ContractViolation):
            member(OrthantCone(2), np.array([np.nan, 0.0]))


class TestDualMember:

    def test_generated_dual_contains_sum(self):
        assert dual_member(GeneratedCone([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 1.0]))

    def test_generated_dual_rejects(self):
        assert not dual_member(GeneratedCone([[1.0, 0.0], [1.0, 1.0]]), np.array([0.0, -1.0]))

    def test_psd_self_dual(self):
        cone = PsdCone(2)
        assert cone.is_self_dual
        assert dual_member(cone, _psd_vec(np.eye(2)))
        assert not dual_member(cone, _psd_vec(np.diag([1.0, -1.0])))

    @pytest.mark.parametrize("cone", [OrthantCone(3), PsdCone(2)], ids=["orthant", "psd"])
    def test_self_dual_on_random_points(self, cone, rng):
        for _ in range(200):
            x = rng.normal(size=cone.ambient_dim)
            assert member(cone, x) == dual_member(cone, x)

    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_generated_dual_matches_pairings(self, dim, rng):
        gens = rng.uniform(0.1, 1.0, size=(dim + 1, dim))
        cone = GeneratedCone(gens, warn_degenerate=False)
        unit_gens = gens / np.linalg.norm(gens, axis=1, keepdims=True)
        for _ in range(100):
            y = rng.normal(size=dim)
            pairings = unit_gens @ y
            if np.min(np.abs(pairings)) < 1e-6:
                continue
            assert dual_member(cone, y) == bool(np.all(pairings > 0))


class TestProject:

    def test_orthant(self):
        np.testing.assert_allclose(project(OrthantCone(3), np.array([1.0, -2.0, 0.0])), [1.0, 0.0, 0.0])

    def test_psd_clamps_eigenvalues(self):
        out = vec_to_herm(project(PsdCone(2), _psd_vec(np.diag([1.0, -1.0]))))
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-12)

    def test_psd_pauli_x(self):
        out = vec_to_herm(project(PsdCone(2), _psd_vec(PAULI_X)))
        np.testing.assert_allclose(out, [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)

    def test_projection_is_member(self, rng):
        cone = PsdCone(3)
        x = rng.normal(size=9)
        assert member(cone, project(cone, x))

    @pytest.mark.parametrize("cone", [OrthantCone(4), PsdCone(2), PsdCone(3)], ids=["orthant", "psd2", "psd3"])
    def test_idempotent(self, cone, rng):
        for _ in range(20):
            p = project(cone, rng.normal(size=cone.ambient_dim))
            np.testing.assert_allclose(project(cone, p), p, atol=1e-12)

    @pytest.mark.parametrize("cone", [OrthantCone(4), PsdCone(2), PsdCone(3)], ids=["orthant", "psd2", "psd3"])
    def test_moreau_decomposition(self, cone, rng):
        for _ in range(20):
            x = rng.normal(size=cone.ambient_dim)
            np.testing.assert_allclose(project(cone, x) - project(cone, -x), x, atol=1e-9)

    def test_generated_unsupported(self):
        with pytest.raises(UnsupportedOperation):
            project(GeneratedCone([[1.0, 0.0], [1.0, 1.0]]), np.array([0.0, 1.0]))


class TestGeneratedCone:

    def test_not_pointed(self):
        with pytest.raises(ContractViolation):
            GeneratedCone([[1.0, 0.0], [-1.0, 0.0]])

    @pytest.mark.parametrize("generators", [[], [[0.0, 0.0]], [[1.0, np.inf]]])
    def test_invalid_generators(self, generators):
        with pytest.raises(ContractViolation):
            GeneratedCone(generators)

    def test_generators_are_columns(self):
        cone = GeneratedCone([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 1.0]])
        assert cone.generators.shape == (3, 4)
        assert cone.n_generators == 4
        assert cone.full_dimensional

    def test_degenerate_cone_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger="src.cones.generated"):
            cone = GeneratedCone([[1.0, 0.0, 0.0]])
        assert not cone.full_dimensional
        assert "subspace" in caplog.text


class TestHermitianCoordinates:

    @pytest.mark.parametrize("d", [2, 3])
    def test_basis_orthonormal(self, d):
        basis = hermitian_basis(d)
        gram = np.einsum("kij,lji->kl", basis, basis)
        np.testing.assert_allclose(gram, np.eye(d * d), atol=1e-12)

    def test_identity_coordinates(self):
        np.testing.assert_allclose(herm_to_vec(np.eye(2)), [1.0, 1.0, 0.0, 0.0])

    def test_pairing_is_trace(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        a, b = a + a.conj().T, b + b.conj().T
        assert herm_to_vec(a) @ herm_to_vec(b) == pytest.approx(np.trace(a @ b).real)
        np.testing.assert_allclose(vec_to_herm(herm_to_vec(a)), a, atol=1e-12)

    def test_map_matrix_of_identity(self):
        np.testing.assert_allclose(linear_map_matrix(lambda m: m, 2, 2), np.eye(4), atol=1e-12)


class TestProductCone:

    def test_split_and_membership(self):
        cone = ProductCone(1, [OrthantCone(2), PsdCone(2)], names=["p", "rho"])
        assert cone.ambient_dim == 7
        x = np.concatenate([[-5.0], [1.0, 2.0], _psd_vec(np.eye(2))])
        free, blocks = cone.split(x)
        np.testing.assert_allclose(free, [-5.0])
        assert [b.shape[0] for b in blocks] == [2, 4]
        assert cone.member(x)
        assert [s for s, _, _ in cone.blocks()] == [1, 3]

    def test_names_must_match(self):
        with pytest.raises(ContractViolation):
            ProductCone(0, [OrthantCone(2)], names=["a", "b"])


class TestConeJson:

    @pytest.mark.parametrize("cone", [OrthantCone(3), PsdCone(2), GeneratedCone([[1.0, 0.0], [1.0, 1.0]])])
    def test_reload(self, cone):
        again = cone_from_json(cone_to_json(cone))
        assert type(again) is type(cone)
        assert again.ambient_dim == cone.ambient_dim
        assert cone_to_json(again) == cone_to_json(cone)

    @pytest.mark.parametrize("data", [
        {"variant": "lorentz", "dim": 3},
        {"variant": "orthant"},
        {"variant": "generated", "dim": 3, "generators": [[1.0, 0.0]]},
        [1, 2]
    ])
    def test_invalid(self, data):
        with pytest.raises(ModelError):
            cone_from_json(data)
