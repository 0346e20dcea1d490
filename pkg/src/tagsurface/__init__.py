"""Simulation of a reconfigurable surface built from backscatter RFID tags.

Submodules
----------
channel
    Path loss, Rician fading and surface geometry.
loads
    Tag load sets and the normalized modulation alphabet.
optimizer
    Exact configuration search by an auxiliary-phase sweep.
estimation
    Pilot-limited MMSE channel estimates.
gen2
    Select/Query control of the tags and reader timing.
experiments
    Monte Carlo studies with CSV output.
"""

from .channel import ChannelSet, LinkGeometry, RicianSpec, draw_channels, path_loss
from .estimation import EstimationSpec, mmse_variance, sample_estimated_channels
from .experiments import (
    GainReport,
    emit_csv,
    run_csi_impact,
    run_gain_vs_distance,
    run_gain_vs_elements,
    run_random_search_experiment,
)
from .gen2 import Gen2Timing, config_switch_time, inventory_power_trace, random_search
from .loads import DegenerateLoadSetError, LoadSet, ModulationAlphabet, modulation_alphabet
from .optimizer import CapacityError, ElementTerms, Solution, brute_force, element_terms, optimize
from .scenario import ScenarioConfig, link_budget, load_config

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ChannelSet",
    "DegenerateLoadSetError",
    "ElementTerms",
    "EstimationSpec",
    "GainReport",
    "Gen2Timing",
    "LinkGeometry",
    "LoadSet",
    "ModulationAlphabet",
    "RicianSpec",
    "ScenarioConfig",
    "Solution",
    "brute_force",
    "config_switch_time",
    "draw_channels",
    "element_terms",
    "emit_csv",
    "inventory_power_trace",
    "link_budget",
    "load_config",
    "mmse_variance",
    "modulation_alphabet",
    "optimize",
    "path_loss",
    "random_search",
    "run_csi_impact",
    "run_gain_vs_distance",
    "run_gain_vs_elements",
    "run_random_search_experiment",
    "sample_estimated_channels",
]
