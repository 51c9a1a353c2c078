"""Chained Bell measures and bounds on predictive advantage over the Born rule."""

from .boxes import BehaviorBox, Check
from .chained import (
    ChainedBellReport,
    ScenarioSettings,
    chained_value,
    chained_value_closed_form,
    chained_value_trace,
    equally_spaced_settings,
    local_deterministic_minimum,
    settings_for_epsilon,
)
from .decomposition import DecompositionModel, advantage, averages_to_quantum, check_no_signalling
from .experiment import EmpiricalCertificate, estimate_chained, sample_rounds
from .lp import lp_max_advantage
from .quantum import EntangledPairState, joint_probability, marginal, povm_element

__version__ = "0.1.0"
