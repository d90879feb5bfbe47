"""Resilience and communication cost of job scheduling in a tree-structured data centre."""

from .commnet import CommGraph, build_comm_graph, job_network_cost
from .engine import RunResult, evaluate_outcome, run_simulation
from .errors import ConfigError
from .experiment import Aggregate, aggregate, normalize_costs, run_scenario, run_sweep
from .failure import FailureEvent, FailureTrace, apply_failure, plan_failures
from .placement import Placement, schedule, schedule_cluster, schedule_pack, schedule_random
from .topology import (Address, HierarchySpec, Level, Topology, build_topology,
                       parse_hierarchy, path_cost, subtree_services, unit_counts)
from .workload import InstanceState, JobSet, ScenarioConfig, Sizing, derive_dc_size, job_failed

__version__ = "0.1.0"
