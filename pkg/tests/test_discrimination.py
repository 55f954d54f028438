import math

import numpy as np
import pytest

from src.cones import herm_to_vec
from src.core.types import ContractViolation
from src.gpt import (
    HADAMARD,
    Channel,
    Measurement,
    StateEnsemble,
    Subchannel,
    base_norm,
    classical_model,
    ket_state,
    quantum_model,
    random_state,
    replacer_channel,
    unitary_channel
)
from src.discrimination import (
    ChannelEnsemble,
    ChannelTask,
    StateTask,
    SubchannelTask,
    advantage_ratio_channel,
    advantage_ratio_channel_ensemble,
    advantage_ratio_generating,
    advantage_ratio_measurement,
    advantage_ratio_state,
    advantage_ratio_subchannel,
    data_hiding_ratio,
    gain_ratio_standard,
    optimal_p_succ,
    p_succ,
    sweep_channel_tasks,
    sweep_measurement_tasks,
    sweep_state_tasks,
    sweep_subchannel_tasks,
    witness_ensemble
)
from src.robustness import (
    GeneratorFreeSet,
    ReplacerChannels,
    all_effects,
    diagonal_effects,
    interval_set,
    measurement_robustness,
    trivial_effects,
    uniform_point
)

TOL = 1e-5


def _ket(model, *amps):
    return ket_state(model, np.array(amps, dtype=complex))


class TestSuccessProbability:

    def test_state_task(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [_ket(qubit, 1, 0), _ket(qubit, 1, 1)])
        task = StateTask(ensemble, Measurement.computational(qubit))
        assert p_succ(task) == pytest.approx(0.75)

    def test_inconclusive_outcome_never_scores(self, bit):
        ensemble = StateEnsemble.uniform(bit, [[1.0, 0.0], [0.0, 1.0]])
        m = Measurement(bit, [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        assert p_succ(StateTask(ensemble, m, inconclusive=True)) == pytest.approx(0.5)

    def test_outcome_count_checked(self, bit):
        ensemble = StateEnsemble.uniform(bit, [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ContractViolation):
            StateTask(ensemble, Measurement.computational(bit), inconclusive=True)

    def test_channel_task(self, qubit):
        ensemble = ChannelEnsemble([0.5, 0.5], [Channel.identity(qubit), unitary_channel(qubit, HADAMARD)])
        m = Measurement.computational(qubit)
        task = ChannelTask(ensemble, _ket(qubit, 1, 0), m)
        assert p_succ(task) == pytest.approx(0.75)
        assert task.score_functional() @ _ket(qubit, 1, 0) == pytest.approx(0.75)

    def test_channel_ensemble_models_must_match(self, qubit, qutrit):
        with pytest.raises(ContractViolation):
            ChannelEnsemble([0.5, 0.5], [Channel.identity(qubit), Channel.identity(qutrit)])

    def test_subchannels_must_sum_to_channel(self, bit):
        half = Subchannel(bit, bit, 0.5 * np.eye(2))
        with pytest.raises(ContractViolation):
            SubchannelTask([half], [1.0, 0.0], Measurement.trivial(bit, 1))
        task = SubchannelTask([half, half], [1.0, 0.0], Measurement.trivial(bit, 2))
        assert p_succ(task) == pytest.approx(0.5)


class TestOptimalSuccess:

    def test_helstrom(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [_ket(qubit, 1, 0), _ket(qubit, 1, 1)])
        value, m = optimal_p_succ(qubit, ensemble)
        assert value == pytest.approx(0.5 * (1.0 + 1.0 / math.sqrt(2.0)), abs=TOL)
        assert p_succ(StateTask(ensemble, m)) == pytest.approx(0.853553, abs=1e-5)

    def test_orthogonal_states(self, qutrit):
        states = [_ket(qutrit, 1, 0, 0), _ket(qutrit, 0, 1, 0), _ket(qutrit, 0, 0, 1)]
        value, _ = optimal_p_succ(qutrit, StateEnsemble.uniform(qutrit, states))
        assert value == pytest.approx(1.0, abs=TOL)

    def test_single_state(self, qubit):
        value, m = optimal_p_succ(qubit, StateEnsemble(qubit, [1.0], [_ket(qubit, 1, 1)]))
        assert value == 1.0
        assert m.n_outcomes == 1

    def test_restricted_to_listed_measurements(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [_ket(qubit, 1, 0), _ket(qubit, 1, 1)])
        value, _ = optimal_p_succ(qubit, ensemble, [Measurement.computational(qubit)])
        assert value == pytest.approx(0.75)

    def test_restricted_to_effect_cone(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [_ket(qubit, 1, 0), _ket(qubit, 1, 1)])
        value, _ = optimal_p_succ(qubit, ensemble, diagonal_effects(qubit))
        assert value == pytest.approx(0.75, abs=TOL)

    def test_empty_restriction(self, qubit):
        ensemble = StateEnsemble.uniform(qubit, [_ket(qubit, 1, 0), _ket(qubit, 0, 1)])
        with pytest.raises(ContractViolation):
            optimal_p_succ(qubit, ensemble, [])

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_binary_classical_matches_base_norm(self, d, rng):
        model = classical_model(d)
        for _ in range(5):
            states = [random_state(model, rng) for _ in range(2)]
            p = rng.uniform(0.1, 0.9)
            value, _ = optimal_p_succ(model, StateEnsemble(model, [p, 1.0 - p], states))
            expected = 0.5 * (1.0 + base_norm(model, p * states[0] - (1.0 - p) * states[1]))
            assert value == pytest.approx(expected, abs=TOL)

    @pytest.mark.slow
    def test_binary_qubit_matches_base_norm(self, qubit, rng):
        for _ in range(10):
            states = [random_state(qubit, rng) for _ in range(2)]
            p = rng.uniform(0.1, 0.9)
            value, m = optimal_p_succ(qubit, StateEnsemble(qubit, [p, 1.0 - p], states))
            expected = 0.5 * (1.0 + base_norm(qubit, p * states[0] - (1.0 - p) * states[1]))
            assert value == pytest.approx(expected, abs=TOL)
            assert m.n_outcomes == 2


class TestAdvantageRatios:

    def test_classical_point_mass(self, trit, uniform_trit):
        report = advantage_ratio_state(trit, uniform_trit, np.array([1.0, 0.0, 0.0]))
        assert report.ratio == pytest.approx(3.0, abs=TOL)
        assert report.predicted == pytest.approx(3.0, abs=TOL)
        assert report.certified

    def test_qubit_coherence(self, qubit, incoherent_qubit):
        report = advantage_ratio_state(qubit, incoherent_qubit, _ket(qubit, 1, 1))
        assert report.ratio == pytest.approx(2.0, abs=TOL)
        assert report.certified
        assert report.to_json()["task"]["variant"] == "channel"

    def test_subchannel(self, qubit, incoherent_qubit):
        report = advantage_ratio_subchannel(qubit, incoherent_qubit, _ket(qubit, 1, 1))
        assert report.ratio == pytest.approx(2.0, abs=TOL)
        assert report.task.inconclusive

    def test_free_state_gives_no_advantage(self, qubit, incoherent_qubit):
        report = advantage_ratio_state(qubit, incoherent_qubit, herm_to_vec(np.diag([0.3, 0.7])))
        assert report.ratio == pytest.approx(1.0, abs=1e-4)

    @pytest.mark.parametrize("d", [2, 3])
    def test_measurement(self, d):
        model = quantum_model(d)
        report = advantage_ratio_measurement(model, trivial_effects(model), Measurement.computational(model))
        assert report.ratio == pytest.approx(float(d), abs=1e-4)
        assert report.certified

    def test_witness_ensemble(self, qubit):
        free = trivial_effects(qubit)
        rob = measurement_robustness(qubit, free, Measurement.computational(qubit))
        ensemble = witness_ensemble(qubit, rob)
        assert len(ensemble) == 2
        assert float(np.sum(ensemble.probs)) == pytest.approx(1.0)

    def test_generating(self, qubit, incoherent_qubit):
        report = advantage_ratio_generating(qubit, qubit, incoherent_qubit, incoherent_qubit,
                                            unitary_channel(qubit, HADAMARD))
        assert report.ratio == pytest.approx(2.0, abs=TOL)
        assert report.certified

    @pytest.mark.parametrize("d", [2, 3])
    def test_identity_channel(self, d):
        model = quantum_model(d)
        report = advantage_ratio_channel(ReplacerChannels(model, model), Channel.identity(model))
        assert report.ratio == pytest.approx(float(d * d), abs=1e-3)
        assert report.task.ancilla == d

    def test_channel_ensemble(self, qubit):
        sigma = herm_to_vec(np.eye(2) / 2.0)
        channels = [Channel.identity(qubit), replacer_channel(qubit, qubit, sigma)]
        report = advantage_ratio_channel_ensemble(ReplacerChannels(qubit, qubit), [0.5, 0.5], channels)
        assert report.ratio == pytest.approx(4.0, abs=1e-3)
        assert report.details["argmax"] == 0

    def test_infinite_robustness_rejected(self, trit):
        free = GeneratorFreeSet(trit, [[1.0, 0.0, 0.0]])
        with pytest.raises(ContractViolation):
            advantage_ratio_state(trit, free, np.array([0.0, 1.0, 0.0]))

    def test_channel_family_checked_against_bound(self, trit, uniform_trit):
        shift = np.roll(np.eye(3), 1, axis=0)
        cyclic = ChannelEnsemble([1.0 / 3.0] * 3, [Channel.identity(trit), Channel(trit, trit, shift),
                                                    Channel(trit, trit, shift @ shift)])
        single = ChannelEnsemble([1.0], [Channel.identity(trit)])
        family = [(cyclic, Measurement.computational(trit)), (single, Measurement.trivial(trit, 1))]
        report = advantage_ratio_state(trit, uniform_trit, np.array([1.0, 0.0, 0.0]), channel_family=family)
        checked = report.details["channel_family"]
        assert checked["tasks"] == 2
        assert checked["max_ratio"] == pytest.approx(3.0, abs=TOL)
        assert checked["respects_bound"]
        assert report.certified

    def test_channel_family_empty(self, trit, uniform_trit):
        with pytest.raises(ContractViolation):
            advantage_ratio_state(trit, uniform_trit, np.array([1.0, 0.0, 0.0]), channel_family=[])

    def test_channel_family_on_other_model(self, trit, uniform_trit, qubit):
        family = [(ChannelEnsemble([1.0], [Channel.identity(qubit)]), Measurement.trivial(qubit, 1))]
        with pytest.raises(ContractViolation):
            advantage_ratio_state(trit, uniform_trit, np.array([1.0, 0.0, 0.0]), channel_family=family)


class TestStandardGain:

    def test_interval(self, bit):
        report = gain_ratio_standard(bit, bit, interval_set(bit, 1.0 / 3.0, 2.0 / 3.0), np.array([1.0, 0.0]))
        assert report.ratio == pytest.approx(3.0, abs=TOL)
        assert report.predicted == pytest.approx(3.0, abs=TOL)
        assert report.certified
        assert report.details["divergent"] is False

    def test_divergent_certified(self, bit):
        report = gain_ratio_standard(bit, bit, uniform_point(bit), np.array([1.0, 0.0]))
        assert report.details["divergent"] is True
        assert report.details["free_gain"] <= 1e-9
        assert report.details["resource_gain"] > 1e-9
        assert report.certified
        assert math.isinf(report.ratio)
        assert report.to_json()["ratio"] == "inf"

    def test_distinct_outputs_required(self, bit):
        with pytest.raises(ContractViolation):
            gain_ratio_standard(bit, bit, interval_set(bit, 0.25, 0.75), np.array([1.0, 0.0]),
                                outputs=[[1.0, 0.0], [1.0, 0.0]])


class TestDataHiding:

    def test_computational_family_hides_coherence(self, qubit):
        result = data_hiding_ratio(qubit, [Measurement.computational(qubit)], restarts=2)
        assert math.isinf(result.value)
        assert result.lower_bound
        assert result.to_json()["value"] == "inf"

    def test_all_effects_hide_nothing(self, qubit, rng):
        result = data_hiding_ratio(qubit, all_effects(qubit), restarts=2, max_rounds=5, rng=rng)
        assert result.value == pytest.approx(1.0, abs=1e-4)


@pytest.mark.slow
class TestSweeps:

    def test_state_tasks(self, qubit, incoherent_qubit, rng):
        sweep = sweep_state_tasks(qubit, incoherent_qubit, _ket(qubit, 1, 1), 30, rng)
        assert sweep.bound == pytest.approx(2.0, abs=TOL)
        assert sweep.respects_bound
        assert len(sweep.rows) == 30

    def test_subchannel_tasks(self, qubit, incoherent_qubit, rng):
        assert sweep_subchannel_tasks(qubit, incoherent_qubit, _ket(qubit, 1, 1), 30, rng).respects_bound

    def test_measurement_tasks(self, qubit, rng):
        sweep = sweep_measurement_tasks(qubit, trivial_effects(qubit), Measurement.computational(qubit), 15, rng)
        assert sweep.respects_bound

    def test_channel_tasks(self, qubit, rng):
        sweep = sweep_channel_tasks(ReplacerChannels(qubit, qubit), Channel.identity(qubit), 10, rng)
        assert sweep.bound == pytest.approx(4.0, abs=1e-3)
        assert sweep.respects_bound
