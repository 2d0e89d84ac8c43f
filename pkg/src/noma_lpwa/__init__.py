"""Uplink NOMA resource allocation and simulation for LPWA networks.

The library follows the estimator idiom: a deployment is generated like a
dataset, :class:`ChannelAllocator`, :class:`TimeAllocator` and
:class:`MaxMinPowerAllocator` are fit on it in turn (or in one go through
:class:`ResourceAllocator`), and rate reports play the role of metrics.
"""

from .__about__ import __version__
from .allocation import Allocation
from .channels import (ChannelAllocator, allocate_channels_random,
                       allocate_channels_roundrobin, rank_statistic)
from .deployment import (Deployment, NetworkConfig, channel_gains,
                         generate_deployment, normalized_gain, spawn_seed)
from .exceptions import ConfigurationError, StructurallyInfeasibleError
from .experiment import (ExperimentConfig, ResultRow, StrategyComparison,
                         compare_strategies, load_rows_csv, parse_config_file,
                         resolve_config, run_experiment, run_trial)
from .interference import (RateReport, collision_factor, interference_weights,
                           min_rate, oma_rate_report, rate_report,
                           shannon_rate_bps, sinr_noma, sinr_plain, sinr_table)
from .planner import ResourceAllocator
from .power import (MaxMinPowerAllocator, PowerProblem, PowerSolution,
                    constraint_slacks, feasibility_solve, least_received_powers,
                    maximize_min_rate, received_lower_bounds,
                    received_upper_bounds, tau_upper_bound)
from .profile import (RadioProfile, dbm_to_mw, mw_to_dbm, noise_variance_mw,
                      sensitivity_threshold_mw, transmission_time_s)
from .times import (TimeAllocator, allocate_time_distance, allocate_time_fair,
                    allocate_time_random, allocate_time_unfair,
                    fair_group_sizes, fair_targets, unfair_group_sizes)

__all__ = [
    "__version__",
    "Allocation", "ChannelAllocator", "ConfigurationError", "Deployment",
    "ExperimentConfig", "MaxMinPowerAllocator", "NetworkConfig",
    "PowerProblem", "PowerSolution", "RadioProfile", "RateReport",
    "ResourceAllocator", "ResultRow", "StrategyComparison",
    "StructurallyInfeasibleError", "TimeAllocator",
    "allocate_channels_random", "allocate_channels_roundrobin",
    "allocate_time_distance", "allocate_time_fair", "allocate_time_random",
    "allocate_time_unfair", "channel_gains", "collision_factor",
    "compare_strategies", "constraint_slacks", "dbm_to_mw",
    "fair_group_sizes", "fair_targets", "feasibility_solve",
    "generate_deployment", "interference_weights", "least_received_powers",
    "load_rows_csv", "maximize_min_rate", "min_rate", "mw_to_dbm",
    "noise_variance_mw", "normalized_gain", "oma_rate_report",
    "parse_config_file", "rank_statistic", "rate_report",
    "received_lower_bounds", "received_upper_bounds", "resolve_config",
    "run_experiment", "run_trial", "sensitivity_threshold_mw",
    "shannon_rate_bps", "sinr_noma", "sinr_plain", "sinr_table", "spawn_seed",
    "tau_upper_bound", "transmission_time_s", "unfair_group_sizes",
]
