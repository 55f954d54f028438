"""
Infotheory module: single-shot min-entropies and min-accessible information.
"""

from .entropy import JointDistribution, h_min, h_min_conditional, i_min
from .accessible import (
    AccessibleAdvantage,
    GainSweep,
    guessing_probability,
    i_min_acc,
    i_min_measured,
    processed_ensemble,
    gain_at,
    accessible_advantage,
    sweep_accessible_gain
)

__all__ = [
    'JointDistribution',
    'h_min',
    'h_min_conditional',
    'i_min',
    'AccessibleAdvantage',
    'GainSweep',
    'guessing_probability',
    'i_min_acc',
    'i_min_measured',
    'processed_ensemble',
    'gain_at',
    'accessible_advantage',
    'sweep_accessible_gain'
]
