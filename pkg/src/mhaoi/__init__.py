"""Age-of-information scheduling in multi-hop wireless networks.

Network model, slotted age dynamics and simulator, the stationary randomized,
age-difference and age-debt scheduling policies, baselines, exact oracles for
small instances, and an experiment harness.
"""

from .costs import CostFunction, Exponential, Indicator, Linear, Power, Table
from .network import (
    ActionSpace,
    Flow,
    NetworkInstance,
    NetworkTopology,
    broadcast_flow,
    build_action_space,
    constrained_min_hops,
    sample_link_states,
    unicast_flow,
    validate_topology,
)
from .simulator import SimulationConfig, run_replications, run_simulation

__version__ = "0.1.0"

__all__ = [
    "ActionSpace", "CostFunction", "Exponential", "Flow", "Indicator", "Linear", "NetworkInstance",
    "NetworkTopology", "Power", "SimulationConfig", "Table", "broadcast_flow", "build_action_space",
    "constrained_min_hops", "run_replications", "run_simulation", "sample_link_states", "unicast_flow",
    "validate_topology",
]
