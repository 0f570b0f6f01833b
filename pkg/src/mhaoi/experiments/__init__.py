"""Experiment configuration, scenario generators, sweeps and result files."""

from .config import ConfigError, ExperimentConfig, parse_config
from .graphs import enumerate_connected_graphs
from .results import ResultRecord, write_results
from .scenarios import Scenario, generate_scenario
from .sweep import SweepResult, run_sweep

__all__ = [
    "ConfigError", "ExperimentConfig", "ResultRecord", "Scenario", "SweepResult", "enumerate_connected_graphs",
    "generate_scenario", "parse_config", "run_sweep", "write_results",
]
