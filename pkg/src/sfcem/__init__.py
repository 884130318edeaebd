"""SFC reconfiguration over servers and programmable-switch memories."""

from .costs import CostBreakdown, DelayBreakdown, Weights, em_unit_delay
from .drl import PolicyBank, TrainingConfig, evaluate, train
from .network import ParamRanges, SubstrateNetwork, build_fat_tree, paper_ranges
from .oracle import enumerate_optimal
from .placement import HostSlot, PlacementConfiguration
from .workload import GenParams, Scenario, generate_scenario, paper_gen_params

__all__ = [
    "CostBreakdown", "DelayBreakdown", "Weights", "em_unit_delay",
    "PolicyBank", "TrainingConfig", "evaluate", "train",
    "ParamRanges", "SubstrateNetwork", "build_fat_tree", "paper_ranges",
    "enumerate_optimal",
    "HostSlot", "PlacementConfiguration",
    "GenParams", "Scenario", "generate_scenario", "paper_gen_params",
]

__version__ = "0.1.0"
