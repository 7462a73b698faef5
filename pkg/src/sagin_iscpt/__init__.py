"""Topology-aware selection for integrated sensing, communication and power
transfer in satellite networks."""

from .baselines import greedy_user_selection, no_selection
from .evaluate import evaluate_decision, mrt_precoder
from .geo import WGS84, EcefPosition, GeodeticPosition, elevation_angle, lla_to_ecef
from .optimizer import IscptDecision, IscptThresholds, build_p2, solve_iscpt
from .scenario import NetworkScenario, ScenarioConfig, build_scenario
from .topology import TopologyGraph, build_topology

__version__ = "0.1.0"
