"""
Robustness module: free sets and the robustness quantifiers of states,
measurements and channels, each returned with its dual witness.
"""

from .free_sets import (
    FreeStateSet,
    GeneratorFreeSet,
    SpectrahedralFreeSet,
    FreeEffectCone,
    FreeChannelSet,
    ReplacerChannels,
    ChoiConeChannels,
    diagonal_states,
    uniform_point,
    interval_set,
    trivial_effects,
    all_effects,
    effects_from_measurements,
    diagonal_effects,
    maximally_incoherent_operations,
    free_set_from_json,
    free_effects_from_json,
    free_channels_from_json
)
from .result import RobustnessResult, json_number, json_witness
from .states import (
    generalized_robustness_state,
    standard_robustness_state,
    free_base_norm,
    divergence_witness
)
from .measurements import measurement_robustness
from .channels import (
    argmax_lowest,
    generating_power,
    channel_robustness,
    ensemble_channel_robustness
)

__all__ = [
    'FreeStateSet',
    'GeneratorFreeSet',
    'SpectrahedralFreeSet',
    'FreeEffectCone',
    'FreeChannelSet',
    'ReplacerChannels',
    'ChoiConeChannels',
    'diagonal_states',
    'uniform_point',
    'interval_set',
    'trivial_effects',
    'all_effects',
    'effects_from_measurements',
    'diagonal_effects',
    'maximally_incoherent_operations',
    'free_set_from_json',
    'free_effects_from_json',
    'free_channels_from_json',
    'RobustnessResult',
    'json_number',
    'json_witness',
    'generalized_robustness_state',
    'standard_robustness_state',
    'free_base_norm',
    'divergence_witness',
    'measurement_robustness',
    'argmax_lowest',
    'generating_power',
    'channel_robustness',
    'ensemble_channel_robustness'
]
