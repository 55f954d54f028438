"""
Discrimination module: tasks, optimal success probabilities and the tasks
built from robustness witnesses that attain the advantage ratios.
"""

from .tasks import (
    ChannelEnsemble,
    DiscriminationTask,
    StateTask,
    ChannelTask,
    SubchannelTask,
    p_succ,
    optimal_p_succ
)
from .advantage import (
    REPORT_TOL,
    AdvantageReport,
    SweepResult,
    advantage_ratio_state,
    advantage_ratio_subchannel,
    advantage_ratio_measurement,
    advantage_ratio_generating,
    advantage_ratio_channel,
    advantage_ratio_channel_ensemble,
    gain_ratio_standard,
    choi_score_functional,
    witness_ensemble,
    sweep_state_tasks,
    sweep_subchannel_tasks,
    sweep_measurement_tasks,
    sweep_channel_tasks
)
from .data_hiding import DataHidingResult, data_hiding_ratio

__all__ = [
    'ChannelEnsemble',
    'DiscriminationTask',
    'StateTask',
    'ChannelTask',
    'SubchannelTask',
    'p_succ',
    'optimal_p_succ',
    'REPORT_TOL',
    'AdvantageReport',
    'SweepResult',
    'advantage_ratio_state',
    'advantage_ratio_subchannel',
    'advantage_ratio_measurement',
    'advantage_ratio_generating',
    'advantage_ratio_channel',
    'advantage_ratio_channel_ensemble',
    'gain_ratio_standard',
    'choi_score_functional',
    'witness_ensemble',
    'sweep_state_tasks',
    'sweep_subchannel_tasks',
    'sweep_measurement_tasks',
    'sweep_channel_tasks',
    'DataHidingResult',
    'data_hiding_ratio'
]
