import math

import numpy as np
import pytest

from src.core.types import ContractViolation
from src.gpt import Measurement, StateEnsemble, ket_state, quantum_model
from src.infotheory import (
    JointDistribution,
    accessible_advantage,
    gain_at,
    guessing_probability,
    h_min,
    h_min_conditional,
    i_min,
    i_min_acc,
    i_min_measured,
    processed_ensemble,
    sweep_accessible_gain
)
from src.robustness import all_effects, trivial_effects


class TestEntropies:

    def test_h_min_uniform(self):
        assert h_min([0.25] * 4) == pytest.approx(2.0)

    def test_h_min_point_mass(self):
        assert h_min([1.0, 0.0]) == pytest.approx(0.0)

    @pytest.mark.parametrize("probs", [[0.5, 0.6], [-0.1, 1.1], [], [np.nan, 1.0]])
    def test_invalid_distribution(self, probs):
        with pytest.raises(ContractViolation):
            h_min(probs)

    def test_correlated_bits(self):
        joint = JointDistribution([[0.5, 0.0], [0.0, 0.5]])
        assert h_min_conditional(joint) == pytest.approx(0.0)
        assert i_min(joint) == pytest.approx(1.0)

    def test_product_distribution(self):
        joint = JointDistribution(np.outer([0.5, 0.5], [0.3, 0.7]))
        assert i_min(joint) == pytest.approx(0.0, abs=1e-12)

    def test_joint_must_be_matrix(self):
        with pytest.raises(ContractViolation):
            JointDistribution([0.5, 0.5])

    def test_marginals(self):
        joint = JointDistribution([[0.1, 0.2], [0.3, 0.4]])
        np.testing.assert_allclose(joint.marginal_x, [0.3, 0.7])
        np.testing.assert_allclose(joint.marginal_y, [0.4, 0.6])


class TestAccessibleInformation:

    def test_orthogonal_pair(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [ket_state(qubit, [1.0, 0.0]), ket_state(qubit, [0.0, 1.0])])
        assert i_min_acc(ensemble) == pytest.approx(1.0, abs=1e-5)

    def test_single_state(self, qubit):
        ensemble = StateEnsemble(qubit, [1.0], [ket_state(qubit, [1.0, 1.0])])
        assert i_min_acc(ensemble) == pytest.approx(0.0)

    def test_non_orthogonal_pair(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [ket_state(qubit, [1.0, 0.0]), ket_state(qubit, [1.0, 1.0])])
        expected = 1.0 + math.log2(0.5 * (1.0 + 1.0 / math.sqrt(2.0)))
        assert i_min_acc(ensemble) == pytest.approx(expected, abs=1e-5)
        assert expected == pytest.approx(0.77155, abs=1e-5)

    def test_classical_guessing_is_exact(self, trit):
        ensemble = StateEnsemble(trit, [0.5, 0.5], [[0.8, 0.2, 0.0], [0.0, 0.2, 0.8]])
        assert guessing_probability(ensemble) == pytest.approx(0.9)

    def test_restricted_to_trivial_effects(self, qubit):
        ensemble = StateEnsemble(qubit, [0.7, 0.3], [ket_state(qubit, [1.0, 0.0]), ket_state(qubit, [0.0, 1.0])])
        assert i_min_acc(ensemble, trivial_effects(qubit)) == pytest.approx(0.0, abs=1e-5)

    def test_measured_information_bounded_by_accessible(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [ket_state(qubit, [1.0, 0.0]), ket_state(qubit, [1.0, 1.0])])
        measured = i_min_measured(ensemble, Measurement.computational(qubit))
        assert measured == pytest.approx(math.log2(1.5), abs=1e-9)
        assert measured <= i_min_acc(ensemble) + 1e-6

    def test_processed_ensemble_is_classical(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [ket_state(qubit, [1.0, 1.0])] * 2)
        processed = processed_ensemble(ensemble, Measurement.computational(qubit))
        assert processed.model.is_classical
        np.testing.assert_allclose(processed.states[0], [0.5, 0.5], atol=1e-12)


class TestAccessibleAdvantage:

    @pytest.mark.parametrize("d", [2, 3])
    def test_computational_over_trivial(self, d):
        model = quantum_model(d)
        adv = accessible_advantage(model, trivial_effects(model), Measurement.computational(model))
        assert adv.predicted == pytest.approx(math.log2(d), abs=1e-5)
        assert adv.gain == pytest.approx(math.log2(d), abs=1e-4)
        assert adv.certified

    def test_free_measurement_has_no_gain(self, qubit):
        adv = accessible_advantage(qubit, all_effects(qubit), Measurement.computational(qubit))
        assert adv.predicted == pytest.approx(0.0, abs=1e-5)
        assert adv.gain == pytest.approx(0.0, abs=1e-5)

    def test_gain_at(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [ket_state(qubit, [1.0, 0.0]), ket_state(qubit, [0.0, 1.0])])
        values = gain_at(trivial_effects(qubit), Measurement.computational(qubit), ensemble)
        assert values["resource"] == pytest.approx(1.0, abs=1e-9)
        assert values["free"] == pytest.approx(0.0, abs=1e-5)

    def test_json(self, qubit):
        data = accessible_advantage(qubit, trivial_effects(qubit), Measurement.computational(qubit)).to_json()
        assert data["certified"] is True
        assert len(data["ensemble"]["probs"]) == 2

    @pytest.mark.slow
    def test_sweep_respects_bound(self, qubit, rng):
        sweep = sweep_accessible_gain(qubit, trivial_effects(qubit), Measurement.computational(qubit),
                                      n_ensembles=20, rng=rng)
        assert sweep.bound == pytest.approx(1.0, abs=1e-5)
        assert len(sweep.gains) == 20
        assert sweep.respects_bound
