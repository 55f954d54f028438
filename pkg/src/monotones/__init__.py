"""
Monotones module: free operation sets and convertibility of states,
measurements and ensembles with separating discrimination tasks.
"""

from .operations import (
    FreeOperationSet,
    ConicOperationSet,
    ChoiOperationSet,
    ConvexHullOperationSet,
    action_matrix,
    doubly_stochastic,
    all_classical_channels,
    unital_quantum,
    all_quantum,
    conic_operations,
    convex_hull_operations,
    operations_from_json
)
from .convertibility import (
    UNARY,
    BINARY_BALANCED,
    CONCLUSIVE,
    INCONCLUSIVE,
    ConversionWitness,
    ConversionVerdict,
    PreprocessingComparison,
    PreprocessingSweep,
    convertible_state,
    tilde_p_succ,
    monotone_violation_search,
    preprocessing_value,
    convertible_with_preprocessing,
    sample_preprocessing_tasks,
    preprocessing_sweep,
    detect_noise,
    tilde_p_succ_ensemble,
    convertible_ensemble,
    convertible_measurement
)

__all__ = [
    'FreeOperationSet',
    'ConicOperationSet',
    'ChoiOperationSet',
    'ConvexHullOperationSet',
    'action_matrix',
    'doubly_stochastic',
    'all_classical_channels',
    'unital_quantum',
    'all_quantum',
    'conic_operations',
    'convex_hull_operations',
    'operations_from_json',
    'UNARY',
    'BINARY_BALANCED',
    'CONCLUSIVE',
    'INCONCLUSIVE',
    'ConversionWitness',
    'ConversionVerdict',
    'PreprocessingComparison',
    'PreprocessingSweep',
    'convertible_state',
    'tilde_p_succ',
    'monotone_violation_search',
    'preprocessing_value',
    'convertible_with_preprocessing',
    'sample_preprocessing_tasks',
    'preprocessing_sweep',
    'detect_noise',
    'tilde_p_succ_ensemble',
    'convertible_ensemble',
    'convertible_measurement'
]
