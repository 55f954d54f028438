import math

import numpy as np
import pytest

from src.cones import GeneratedCone, herm_to_vec, vec_to_herm
from src.core.types import ContractViolation, ModelError, UnsupportedOperation
from src.gpt import (
    HADAMARD,
    Channel,
    Measurement,
    classical_model,
    classical_post_processing,
    depolarizing_channel,
    ket_state,
    quantum_model,
    random_measurement,
    random_state,
    replacer_channel,
    unitary_channel
)
from src.robustness import (
    ChoiConeChannels,
    FreeEffectCone,
    GeneratorFreeSet,
    ReplacerChannels,
    RobustnessResult,
    SpectrahedralFreeSet,
    argmax_lowest,
    channel_robustness,
    diagonal_effects,
    diagonal_states,
    divergence_witness,
    ensemble_channel_robustness,
    free_base_norm,
    free_channels_from_json,
    free_effects_from_json,
    free_set_from_json,
    generalized_robustness_state,
    generating_power,
    interval_set,
    maximally_incoherent_operations,
    measurement_robustness,
    standard_robustness_state,
    trivial_effects,
    uniform_point
)

TOL = 1e-5


def _plus(model):
    return ket_state(model, np.ones(model.size))


class TestFreeSets:

    def test_diagonal_states_quantum_only(self, bit):
        with pytest.raises(UnsupportedOperation):
            diagonal_states(bit)

    def test_generator_membership(self, qubit, incoherent_qubit):
        assert incoherent_qubit.polyhedral
        assert incoherent_qubit.contains(herm_to_vec(np.diag([0.3, 0.7])))
        assert not incoherent_qubit.contains(_plus(qubit))

    def test_interval_bounds(self, bit, trit):
        with pytest.raises(ContractViolation):
            interval_set(bit, 0.7, 0.3)
        with pytest.raises(ContractViolation):
            interval_set(trit, 0.3, 0.7)
        assert len(interval_set(bit, 0.5, 0.5).generators()) == 1

    def test_support_ties_lowest_index(self, trit):
        free = GeneratorFreeSet(trit, np.eye(3))
        value, point = free.support(np.array([1.0, 1.0, 0.0]))
        assert value == pytest.approx(1.0)
        np.testing.assert_allclose(point, [1.0, 0.0, 0.0])

    def test_spectrahedral_incoherent(self, qubit):
        # off-diagonal coordinates vanish
        free = SpectrahedralFreeSet(qubit, np.eye(4)[2:], np.zeros(2))
        assert not free.polyhedral
        assert free.interior
        assert free.contains(herm_to_vec(np.diag([0.2, 0.8])))
        assert not free.contains(_plus(qubit))
        assert not free.spans

    def test_interior(self, bit, uniform_trit):
        assert uniform_trit.interior
        assert not GeneratorFreeSet(bit, [[1.0, 0.0]]).interior

    @pytest.mark.parametrize("data", [
        {"kind": "interval", "lo": 0.25, "hi": 0.75},
        {"kind": "uniform"},
        {"free": {"kind": "generators", "generators": [[1.0, 0.0], [0.5, 0.5]]}}
    ])
    def test_json(self, bit, data):
        free = free_set_from_json(bit, data)
        again = free_set_from_json(bit, free.to_json())
        assert again.to_json() == free.to_json()

    @pytest.mark.parametrize("data", [{"kind": "polytope"}, {"kind": "interval", "lo": 0.1}, {"kind": "diagonal"}])
    def test_invalid_json(self, bit, data):
        with pytest.raises(ModelError):
            free_set_from_json(bit, data)


class TestFreeEffects:

    def test_trivial_effects_strictly_positive(self, qubit):
        assert trivial_effects(qubit).strictly_positive
        assert diagonal_effects(qubit).strictly_positive

    def test_not_strictly_positive(self, qubit):
        free = FreeEffectCone(qubit, GeneratedCone([[1.0, 0.0, 0.0, 0.0]], warn_degenerate=False))
        assert not free.strictly_positive
        with pytest.raises(ContractViolation):
            measurement_robustness(qubit, free, Measurement.computational(qubit))

    def test_generators_outside_dual_cone(self, bit):
        with pytest.raises(ContractViolation):
            FreeEffectCone(bit, GeneratedCone([[1.0, -0.5]]))

    @pytest.mark.parametrize("kind", ["trivial", "diagonal", "all"])
    def test_json(self, qubit, kind):
        free = free_effects_from_json(qubit, {"kind": kind})
        assert free_effects_from_json(qubit, free.to_json()).to_json() == free.to_json()


class TestFreeChannels:

    def test_unital_needs_equal_dimensions(self, qubit, qutrit):
        with pytest.raises(ContractViolation):
            ChoiConeChannels(qubit, qutrit, unital=True)

    def test_quantum_only(self, bit):
        with pytest.raises(UnsupportedOperation):
            ReplacerChannels(bit, bit)

    def test_membership(self, qubit):
        mio = maximally_incoherent_operations(qubit)
        assert mio.contains(Channel.identity(qubit))
        assert not mio.contains(unitary_channel(qubit, HADAMARD))
        replacers = ReplacerChannels(qubit, qubit)
        assert replacers.contains(replacer_channel(qubit, qubit, _plus(qubit)))
        assert not replacers.contains(Channel.identity(qubit))
        assert replacers.interior

    def test_json(self, qubit):
        free = free_channels_from_json(qubit, qubit, {"kind": "choi", "ppt": True, "unital": True})
        assert free.to_json() == {"kind": "choi", "diagonal": False, "ppt": True, "unital": True,
                                  "incoherent": False}
        with pytest.raises(ModelError):
            free_channels_from_json(qubit, qubit, {"kind": "local"})


class TestGeneralizedRobustness:

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_classical_point_mass(self, d):
        model = classical_model(d)
        result = generalized_robustness_state(model, uniform_point(model), np.eye(d)[0])
        assert result.value == pytest.approx(d - 1, abs=TOL)

    def test_point_mass_witness(self, trit, uniform_trit):
        w = np.array([1.0, 0.0, 0.0])
        result = generalized_robustness_state(trit, uniform_trit, w)
        x = result.witness
        assert np.min(x) >= -TOL
        assert x @ w == pytest.approx(1.0 + result.value, abs=TOL)
        assert x @ trit.reference_state() <= 1.0 + TOL
        assert result.certificate.passed

    @pytest.mark.parametrize("d", [2, 3])
    def test_maximally_coherent(self, d):
        model = quantum_model(d)
        free = diagonal_states(model)
        result = generalized_robustness_state(model, free, _plus(model))
        assert result.value == pytest.approx(d - 1, abs=TOL)
        assert free.contains(result.details["free_state"], tol=1e-5)
        assert np.linalg.eigvalsh(vec_to_herm(result.witness))[0] >= -TOL

    def test_spectrahedral_matches_generators(self, qubit):
        free = SpectrahedralFreeSet(qubit, np.eye(4)[2:], np.zeros(2))
        assert generalized_robustness_state(qubit, free, _plus(qubit)).value == pytest.approx(1.0, abs=TOL)

    def test_free_state_has_zero_robustness(self, qubit, incoherent_qubit):
        result = generalized_robustness_state(qubit, incoherent_qubit, herm_to_vec(np.diag([0.4, 0.6])))
        assert result.value == pytest.approx(0.0, abs=TOL)

    def test_invalid_state(self, bit):
        with pytest.raises(ContractViolation):
            generalized_robustness_state(bit, uniform_point(bit), np.array([0.7, 0.7]))


    def test_boundary_free_set_diverges(self, bit):
        free = GeneratorFreeSet(bit, [[1.0, 0.0]])
        assert not free.interior
        result = generalized_robustness_state(bit, free, np.array([0.0, 1.0]))
        assert math.isinf(result.value)
        assert not result.finite

    def test_qubit_matches_l1_coherence(self, qubit, incoherent_qubit, rng):
        for _ in range(5):
            w = random_state(qubit, rng)
            rho = vec_to_herm(w)
            expected = 2.0 * abs(rho[0, 1])
            assert generalized_robustness_state(qubit, incoherent_qubit, w).value == pytest.approx(expected, abs=TOL)

    def test_faithful(self, qubit, incoherent_qubit, rng):
        for _ in range(5):
            rho = vec_to_herm(random_state(qubit, rng))
            if abs(rho[0, 1]) < 1e-3:
                continue
            assert generalized_robustness_state(qubit, incoherent_qubit, herm_to_vec(rho)).value > 1e-4
            dephased = herm_to_vec(np.diag(np.diag(rho)))
            assert generalized_robustness_state(qubit, incoherent_qubit, dephased).value == pytest.approx(0.0, abs=TOL)

    @pytest.mark.slow
    def test_convex(self, qubit, incoherent_qubit, rng):
        for _ in range(5):
            w1, w2 = random_state(qubit, rng), random_state(qubit, rng)
            lam = rng.uniform(0.1, 0.9)
            r1 = generalized_robustness_state(qubit, incoherent_qubit, w1).value
            r2 = generalized_robustness_state(qubit, incoherent_qubit, w2).value
            mixed = generalized_robustness_state(qubit, incoherent_qubit, lam * w1 + (1.0 - lam) * w2).value
            assert mixed <= lam * r1 + (1.0 - lam) * r2 + TOL
    @pytest.mark.slow
    def test_robustness_is_monotone_under_free_mixing(self, qutrit, incoherent_qutrit, rng):
        # mixing with a free state cannot increase robustness
        for _ in range(5):
            w = random_state(qutrit, rng)
            mixed = 0.5 * w + 0.5 * qutrit.reference_state()
            r_w = generalized_robustness_state(qutrit, incoherent_qutrit, w).value
            r_mixed = generalized_robustness_state(qutrit, incoherent_qutrit, mixed).value
            assert r_mixed <= r_w + TOL


class TestStandardRobustness:

    def test_interval(self, bit):
        result = standard_robustness_state(bit, interval_set(bit, 1.0 / 3.0, 2.0 / 3.0), np.array([1.0, 0.0]))
        assert result.value == pytest.approx(1.0, abs=TOL)
        assert result.details["base_norm"] == pytest.approx(3.0, abs=TOL)
        assert result.details["divergent"] is False

    def test_witness_bounds(self, bit):
        free = interval_set(bit, 1.0 / 3.0, 2.0 / 3.0)
        w = np.array([1.0, 0.0])
        result = standard_robustness_state(bit, free, w)
        x = result.witness
        assert x @ w == pytest.approx(1.0 + 2.0 * result.value, abs=TOL)
        for s in free.generators():
            assert abs(x @ s) <= 1.0 + TOL

    def test_uniform_point_diverges(self, bit):
        free = uniform_point(bit)
        result = standard_robustness_state(bit, free, np.array([1.0, 0.0]))
        assert math.isinf(result.value)
        assert not result.finite
        assert result.details == {"divergent": True}
        assert result.to_json()["value"] == "inf"
        z = result.witness
        assert z @ bit.reference_state() == pytest.approx(0.0, abs=1e-12)
        assert z @ np.array([1.0, 0.0]) == pytest.approx(1.0)

    def test_divergence_witness_inside_span(self, bit):
        assert divergence_witness(bit, interval_set(bit, 0.25, 0.75), np.array([1.0, 0.0])) is None

    def test_free_base_norm(self, bit):
        assert math.isinf(free_base_norm(bit, uniform_point(bit), np.array([1.0, 0.0])))
        value = free_base_norm(bit, interval_set(bit, 1.0 / 3.0, 2.0 / 3.0), np.array([1.0, 0.0]))
        assert value == pytest.approx(3.0, abs=TOL)


    def test_dominates_generalized(self, trit, rng):
        free = GeneratorFreeSet(trit, [[0.6, 0.2, 0.2], [0.2, 0.6, 0.2], [0.2, 0.2, 0.6]])
        assert free.spans
        for _ in range(10):
            w = random_state(trit, rng)
            standard = standard_robustness_state(trit, free, w).value
            generalized = generalized_robustness_state(trit, free, w).value
            assert standard >= generalized - TOL

class TestMeasurementRobustness:

    @pytest.mark.parametrize("d, expected", [(2, 1.0), (3, 2.0)])
    def test_computational_against_trivial(self, d, expected):
        model = quantum_model(d)
        m = Measurement.computational(model)
        result = measurement_robustness(model, trivial_effects(model), m)
        assert result.value == pytest.approx(expected, abs=TOL)
        omegas = result.witness
        assert len(omegas) == d
        assert sum(e @ w for e, w in zip(m.effects, omegas)) == pytest.approx(1.0 + expected, abs=1e-4)
        assert model.unit_effect @ result.details["eta"] == pytest.approx(1.0, abs=1e-4)

    def test_free_measurement(self, qubit):
        m = Measurement.trivial(qubit, 2)
        assert measurement_robustness(qubit, trivial_effects(qubit), m).value == pytest.approx(0.0, abs=TOL)

    def test_monotone_under_post_processing(self, qubit, rng):
        free = trivial_effects(qubit)
        for _ in range(5):
            m = random_measurement(qubit, 3, rng)
            coarse = classical_post_processing(m, rng.dirichlet(np.ones(2), size=3).T)
            fine_value = measurement_robustness(qubit, free, m).value
            assert measurement_robustness(qubit, free, coarse).value <= fine_value + TOL


class TestChannelRobustness:

    def test_hadamard_generating_power(self, qubit, incoherent_qubit):
        result = generating_power(qubit, qubit, incoherent_qubit, incoherent_qubit, unitary_channel(qubit, HADAMARD))
        assert result.value == pytest.approx(1.0, abs=TOL)
        assert result.details["argmax"] == 0
        assert result.details["net_size"] == 2
        assert result.details["net_resolution"] == 0.0

    def test_free_channel_has_zero_generating_power(self, qubit, incoherent_qubit):
        result = generating_power(qubit, qubit, incoherent_qubit, incoherent_qubit, Channel.identity(qubit))
        assert result.value == pytest.approx(0.0, abs=TOL)

    def test_model_mismatch(self, qubit, qutrit, incoherent_qubit):
        with pytest.raises(ContractViolation):
            generating_power(qutrit, qutrit, incoherent_qubit, incoherent_qubit, Channel.identity(qubit))

    @pytest.mark.parametrize("d, expected", [(2, 3.0), (3, 8.0)])
    def test_identity_against_replacers(self, d, expected):
        model = quantum_model(d)
        result = channel_robustness(ReplacerChannels(model, model), Channel.identity(model))
        assert result.value == pytest.approx(expected, abs=1e-4)

    def test_replacer_is_free(self, qubit):
        sigma = herm_to_vec(np.eye(2) / 2.0)
        result = channel_robustness(ReplacerChannels(qubit, qubit), replacer_channel(qubit, qubit, sigma))
        assert result.value == pytest.approx(0.0, abs=TOL)

    def test_depolarizing_is_less_robust(self, qubit):
        free = ReplacerChannels(qubit, qubit)
        noisy = channel_robustness(free, depolarizing_channel(qubit, 0.5)).value
        assert 0.0 < noisy < 3.0

    def test_ensemble(self, qubit):
        sigma = herm_to_vec(np.eye(2) / 2.0)
        channels = [Channel.identity(qubit), replacer_channel(qubit, qubit, sigma)]
        result = ensemble_channel_robustness(ReplacerChannels(qubit, qubit), [0.5, 0.5], channels)
        assert result.value == pytest.approx(3.0, abs=1e-4)
        assert result.details["argmax"] == 0
        assert result.details["values"][1] == pytest.approx(0.0, abs=TOL)

    def test_ensemble_rejects_zero_probability(self, qubit):
        channels = [Channel.identity(qubit), Channel.identity(qubit)]
        with pytest.raises(ContractViolation):
            ensemble_channel_robustness(ReplacerChannels(qubit, qubit), [1.0, 0.0], channels)


class TestHelpers:

    @pytest.mark.parametrize("values, expected", [
        ([1.0, 3.0, 3.0 - 1e-12], 1),
        ([2.0, 2.0], 0),
        ([0.0, math.inf, math.inf], 1)
    ])
    def test_argmax_lowest(self, values, expected):
        assert argmax_lowest(values) == expected

    def test_result_json(self):
        result = RobustnessResult("generalized", 1.5, witness=np.array([1.0, 2.0]), details={"argmax": 0})
        out = result.to_json()
        assert out["value"] == 1.5
        assert out["witness"] == [1.0, 2.0]
        assert out["details"] == {"argmax": 0}
        assert out["certificate"] is None
