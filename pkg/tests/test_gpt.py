import numpy as np
import pytest

from src.cones import GeneratedCone, herm_to_vec, vec_to_herm
from src.core.types import ContractViolation, ModelError, UnsupportedOperation
from src.gpt import (
    HADAMARD,
    Channel,
    EffectConeFamily,
    Measurement,
    State,
    StateEnsemble,
    Subchannel,
    apply_id_tensor,
    base_norm,
    bloch_state,
    channel_from_choi,
    choi,
    classical_model,
    classical_post_processing,
    custom_model,
    depolarizing_channel,
    distinguishability_norm,
    is_informationally_complete,
    ket_state,
    max_entangled_state,
    measure_and_prepare,
    measurement_channel,
    model_from_json,
    order_unit_norm,
    partial_trace,
    partial_transpose,
    quantum_model,
    random_channel,
    random_hermitian,
    random_measurement,
    random_state,
    replacer_channel,
    support_conic,
    transpose_map,
    unitary_channel
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])


@pytest.fixture
def square():
    """Square-bit model: four extreme states around U = (1, 0, 0)."""
    cone = GeneratedCone([[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [1.0, -1.0, 0.0], [1.0, 0.0, -1.0]])
    return custom_model(cone, np.array([1.0, 0.0, 0.0]))


class TestModels:

    def test_qubit_unit_effect(self, qubit):
        np.testing.assert_allclose(qubit.unit_effect, [1.0, 1.0, 0.0, 0.0])
        assert qubit.dim == 4
        np.testing.assert_allclose(qubit.reference_state(), [0.5, 0.5, 0.0, 0.0])

    @pytest.mark.parametrize("factory", [quantum_model, classical_model])
    def test_too_small(self, factory):
        with pytest.raises(ContractViolation):
            factory(1)

    def test_unit_effect_must_be_positive(self):
        with pytest.raises(ContractViolation):
            custom_model(GeneratedCone([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 0.0]))

    def test_json_wrapper(self, qubit):
        assert model_from_json({"model": {"kind": "quantum", "dim": 2}}) == qubit
        assert model_from_json(qubit.to_json()) == qubit

    def test_custom_json(self, square):
        again = model_from_json(square.to_json())
        assert again == square
        assert again.dim == 3

    @pytest.mark.parametrize("data", [{"kind": "octonion", "dim": 2}, {"kind": "quantum"}, "quantum"])
    def test_invalid_json(self, data):
        with pytest.raises(ModelError):
            model_from_json(data)

    def test_extreme_states(self, trit, square):
        assert len(trit.extreme_states()) == 3
        np.testing.assert_allclose(square.extreme_states()[2], [1.0, -1.0, 0.0])

    def test_quantum_has_no_vertex_list(self, qubit):
        with pytest.raises(UnsupportedOperation):
            qubit.extreme_states()

    def test_support(self, qubit, bit):
        assert qubit.support(herm_to_vec(np.diag([3.0, -1.0]))) == pytest.approx(3.0)
        np.testing.assert_allclose(bit.maximizer(np.array([1.0, 2.0])), [0.0, 1.0])

    def test_support_conic_agrees(self, qubit):
        y = herm_to_vec(PAULI_X)
        assert support_conic(qubit, y) == pytest.approx(qubit.support(y), abs=1e-5)


class TestObjects:

    def test_bloch_vector_too_long(self, qubit):
        with pytest.raises(ContractViolation):
            State(qubit, bloch_state(qubit, [1.2, 0.0, 0.0]))

    def test_unnormalized_state(self, bit):
        with pytest.raises(ContractViolation):
            State(bit, [0.5, 0.6])

    def test_pure_state_accepted(self, qubit):
        state = State(qubit, ket_state(qubit, [1.0, 1.0]))
        np.testing.assert_allclose(vec_to_herm(state.vector), [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)

    def test_measurement_completeness(self, bit):
        with pytest.raises(ContractViolation):
            Measurement(bit, [[1.0, 0.0], [0.0, 0.5]])

    def test_measurement_probabilities(self, qubit):
        m = Measurement.computational(qubit)
        np.testing.assert_allclose(m.probabilities(ket_state(qubit, [1.0, 1.0])), [0.5, 0.5])
        assert Measurement.trivial(qubit, 3).n_outcomes == 3

    def test_repair(self, bit):
        m = Measurement.repair(bit, [np.array([1.0, 0.0]), np.array([0.0, 1.0 - 1e-8])])
        np.testing.assert_allclose(m.effects[1], [0.0, 1.0])

    def test_ensemble_probabilities(self, bit):
        with pytest.raises(ContractViolation):
            StateEnsemble(bit, [0.5, 0.6], [[1.0, 0.0], [0.0, 1.0]])
        ensemble = StateEnsemble.uniform(bit, [[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(ensemble.weighted()[1], [0.0, 0.5])

    def test_subchannel_may_lose_weight(self, bit):
        Subchannel(bit, bit, 0.5 * np.eye(2))
        with pytest.raises(ContractViolation):
            Subchannel(bit, bit, 2.0 * np.eye(2))


class TestChannels:

    def test_normalization_checked(self, bit):
        with pytest.raises(ContractViolation):
            Channel(bit, bit, np.array([[1.0, 0.0], [0.0, 0.5]]))

    def test_shape_checked(self, bit, trit):
        with pytest.raises(ContractViolation):
            Channel(bit, trit, np.eye(2))

    def test_transpose_not_cp(self, qubit):
        t = transpose_map(qubit)
        assert not t.is_completely_positive()
        with pytest.raises(ContractViolation):
            Channel(qubit, qubit, t.matrix)

    def test_choi_of_identity(self, qubit):
        j = vec_to_herm(choi(Channel.identity(qubit)))
        assert np.trace(j).real == pytest.approx(2.0)
        np.testing.assert_allclose(j, 2.0 * vec_to_herm(max_entangled_state(2)), atol=1e-12)

    def test_choi_of_depolarizing(self, qubit):
        j = vec_to_herm(choi(depolarizing_channel(qubit, 1.0)))
        np.testing.assert_allclose(j, np.eye(4) / 2.0, atol=1e-12)

    def test_choi_round_trip(self, qubit, rng):
        channel = random_channel(qubit, qubit, rng)
        again = channel_from_choi(choi(channel), qubit, qubit)
        np.testing.assert_allclose(again.matrix, channel.matrix, atol=1e-10)

    def test_partial_transpose_detects_transpose(self, qubit):
        j = vec_to_herm(choi(transpose_map(qubit)))
        np.testing.assert_allclose(partial_transpose(j, (2, 2)), vec_to_herm(choi(Channel.identity(qubit))),
                                   atol=1e-12)

    def test_partial_trace_of_product(self):
        a = np.diag([0.25, 0.75])
        b = np.array([[0.5, 0.5], [0.5, 0.5]])
        np.testing.assert_allclose(partial_trace(np.kron(a, b), (2, 2), keep=0), a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(np.kron(a, b), (2, 2), keep=1), b, atol=1e-12)

    def test_identity_on_half_of_entangled_state(self, qubit):
        phi = max_entangled_state(2)
        np.testing.assert_allclose(apply_id_tensor(Channel.identity(qubit), phi, 2), phi, atol=1e-12)

    def test_hadamard(self, qubit):
        h = unitary_channel(qubit, HADAMARD)
        np.testing.assert_allclose(h(ket_state(qubit, [1.0, 0.0])), ket_state(qubit, [1.0, 1.0]), atol=1e-12)

    def test_dual_pairing(self, qubit, rng):
        channel = random_channel(qubit, qubit, rng)
        x = random_state(qubit, rng)
        e = random_measurement(qubit, 2, rng).effects[0]
        assert e @ channel(x) == pytest.approx(channel.dual(e) @ x)

    def test_replacer(self, bit, qubit):
        sigma = herm_to_vec(np.eye(2) / 2.0)
        out = replacer_channel(bit, qubit, sigma)([0.3, 0.7])
        np.testing.assert_allclose(out, sigma)

    def test_measure_and_prepare(self, qubit):
        m = Measurement.computational(qubit)
        flip = measure_and_prepare(m, [ket_state(qubit, [0.0, 1.0]), ket_state(qubit, [1.0, 0.0])], qubit)
        np.testing.assert_allclose(flip(ket_state(qubit, [1.0, 0.0])), ket_state(qubit, [0.0, 1.0]), atol=1e-12)

    def test_measurement_channel(self, qubit):
        out = measurement_channel(Measurement.computational(qubit))(ket_state(qubit, [1.0, 0.0]))
        np.testing.assert_allclose(out, [1.0, 0.0], atol=1e-12)

    def test_post_processing_to_trivial(self, qubit):
        merged = classical_post_processing(Measurement.computational(qubit), np.array([[1.0, 1.0]]))
        np.testing.assert_allclose(merged.effects[0], qubit.unit_effect, atol=1e-12)

    def test_random_objects_are_valid(self, qubit, trit, rng):
        assert random_channel(qubit, qubit, rng).is_completely_positive()
        State(trit, random_state(trit, rng))
        assert random_measurement(trit, 3, rng).n_outcomes == 3


class TestNorms:

    @pytest.mark.parametrize("method", ["auto", "conic"])
    def test_base_norm_qubit(self, qubit, method):
        assert base_norm(qubit, herm_to_vec(np.diag([1.0, -1.0])), method) == pytest.approx(2.0, abs=1e-5)

    @pytest.mark.parametrize("method", ["auto", "conic"])
    def test_order_unit_norm_qubit(self, qubit, method):
        assert order_unit_norm(qubit, herm_to_vec(np.diag([3.0, -1.0])), method) == pytest.approx(3.0, abs=1e-5)

    def test_base_norm_classical(self, trit):
        assert base_norm(trit, np.array([0.5, -0.25, 0.0])) == pytest.approx(0.75)

    def test_base_norm_of_state_is_one(self, qutrit, rng):
        assert base_norm(qutrit, random_state(qutrit, rng)) == pytest.approx(1.0)

    def test_base_norm_square(self, square):
        assert base_norm(square, np.array([0.0, 2.0, 0.0])) == pytest.approx(2.0, abs=1e-5)

    @pytest.mark.parametrize("model_name", ["trit", "qutrit"])
    def test_base_norm_is_a_norm(self, model_name, request, rng):
        model = request.getfixturevalue(model_name)
        for _ in range(20):
            x, y = rng.normal(size=model.dim), rng.normal(size=model.dim)
            assert base_norm(model, x + y) <= base_norm(model, x) + base_norm(model, y) + 1e-9
            c = rng.normal()
            assert base_norm(model, c * x) == pytest.approx(abs(c) * base_norm(model, x), rel=1e-9)

    @pytest.mark.parametrize("d", [2, 3])
    def test_quantum_norms_are_eigenvalue_norms(self, d, rng):
        model = quantum_model(d)
        for _ in range(10):
            h = random_hermitian(d, rng)
            eigs = np.linalg.eigvalsh(h)
            x = herm_to_vec(h)
            assert base_norm(model, x) == pytest.approx(np.sum(np.abs(eigs)), rel=1e-9)
            assert order_unit_norm(model, x) == pytest.approx(np.max(np.abs(eigs)), rel=1e-9)

    @pytest.mark.slow
    def test_conic_norms_match_eigenvalues(self, qubit, rng):
        for _ in range(5):
            h = random_hermitian(2, rng)
            eigs = np.linalg.eigvalsh(h)
            x = herm_to_vec(h)
            assert base_norm(qubit, x, "conic") == pytest.approx(np.sum(np.abs(eigs)), abs=1e-5)
            assert order_unit_norm(qubit, x, "conic") == pytest.approx(np.max(np.abs(eigs)), abs=1e-5)

    def test_unknown_method(self, qubit):
        with pytest.raises(ContractViolation):
            base_norm(qubit, qubit.reference_state(), "simplex")

    def test_distinguishability_identity_measurement(self, bit):
        family = [Measurement.computational(bit)]
        assert distinguishability_norm(bit, family, np.array([0.5, -0.5])) == pytest.approx(1.0)

    def test_distinguishability_blind_to_coherence(self, qubit):
        family = [Measurement.computational(qubit)]
        assert not is_informationally_complete(qubit, family)
        assert distinguishability_norm(qubit, family, herm_to_vec(PAULI_X)) == pytest.approx(0.0, abs=1e-12)

    def test_distinguishability_full_cone_is_base_norm(self, qubit):
        family = EffectConeFamily(qubit, qubit.state_cone)
        x = herm_to_vec(PAULI_X) / 2.0
        assert distinguishability_norm(qubit, family, x) == pytest.approx(base_norm(qubit, x))
        assert distinguishability_norm(qubit, family, x, "conic") == pytest.approx(1.0, abs=1e-5)

    def test_empty_family(self, bit):
        with pytest.raises(ContractViolation):
            distinguishability_norm(bit, [], np.array([0.5, -0.5]))
