"""
GPT module: models, states, effects, measurements, channels and the norms
of the state space.
"""

from .model import GptModel, quantum_model, classical_model, custom_model, model_from_json
from .objects import (
    DEFAULT_TRANSFORMATIONS,
    State,
    Effect,
    Measurement,
    Channel,
    Subchannel,
    StateEnsemble,
    clean_state,
    ensure_measurement,
    vectors_of
)
from .channels import (
    HADAMARD,
    choi,
    choi_of_matrix,
    channel_from_choi,
    matrix_from_choi,
    partial_trace,
    partial_trace_in,
    partial_trace_out,
    partial_transpose,
    ket_state,
    bloch_state,
    max_entangled_state,
    tensor_states,
    apply_id_tensor,
    unitary_channel,
    depolarizing_channel,
    transpose_map,
    replacer_channel,
    measure_and_prepare,
    measurement_channel,
    dual_map,
    classical_post_processing,
    random_state,
    random_measurement,
    random_effect,
    random_channel,
    random_hermitian,
    random_density_matrix
)
from .norms import (
    EffectConeFamily,
    base_norm,
    order_unit_norm,
    support_conic,
    distinguishability_norm,
    is_informationally_complete
)

__all__ = [
    'GptModel',
    'quantum_model',
    'classical_model',
    'custom_model',
    'model_from_json',
    'DEFAULT_TRANSFORMATIONS',
    'State',
    'Effect',
    'Measurement',
    'Channel',
    'Subchannel',
    'StateEnsemble',
    'clean_state',
    'ensure_measurement',
    'vectors_of',
    'HADAMARD',
    'choi',
    'choi_of_matrix',
    'channel_from_choi',
    'matrix_from_choi',
    'partial_trace',
    'partial_trace_in',
    'partial_trace_out',
    'partial_transpose',
    'ket_state',
    'bloch_state',
    'max_entangled_state',
    'tensor_states',
    'apply_id_tensor',
    'unitary_channel',
    'depolarizing_channel',
    'transpose_map',
    'replacer_channel',
    'measure_and_prepare',
    'measurement_channel',
    'dual_map',
    'classical_post_processing',
    'random_state',
    'random_measurement',
    'random_effect',
    'random_channel',
    'random_hermitian',
    'random_density_matrix',
    'EffectConeFamily',
    'base_norm',
    'order_unit_norm',
    'support_conic',
    'distinguishability_norm',
    'is_informationally_complete'
]
