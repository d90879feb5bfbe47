"""A single simulation run: schedule, fail, sample communication cost, score."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .commnet import build_comm_graph, job_network_cost
from .failure import FailureTrace, apply_failure, plan_failures
from .placement import Placement, schedule
from .topology import Level, Topology, build_topology
from .workload import InstanceState, JobSet, ScenarioConfig, derive_dc_size


@dataclass
class RunResult:
    seed: int
    rejected: bool
    job_success: np.ndarray
    job_cost: np.ndarray
    failure_event_counts: dict = field(default_factory=dict)
    surviving_fraction: float = 1.0

    @property
    def jobs_succeeded(self) -> int:
        return int(np.count_nonzero(self.job_success))

    @property
    def S_J(self) -> float:
        """Fraction of jobs that completed."""
        return self.jobs_succeeded / len(self.job_success)

    @property
    def C_J(self):
        """Mean time-averaged cost over successful jobs; ``None`` if none succeeded."""
        if not self.jobs_succeeded:
            return None
        return float(self.job_cost[self.job_success].mean())


def run_streams(seed: int):
    """Independent generators for scheduling and failures.

    Failure draws never depend on the scheduler, so equal seeds give every
    scheduler the same failure trace on the same topology.
    """
    sched, fail = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(sched), np.random.default_rng(fail)


def evaluate_outcome(topology: Topology, states: InstanceState):
    """Per-job success flags and whether the whole data centre died."""
    jobset = states.jobset
    success = np.array([not states.job_failed(j) for j in range(jobset.jobs)])
    return success, bool(topology.all_failed)


def run_simulation(config: ScenarioConfig, seed: int | None = None, *,
                   placement: Placement | None = None,
                   trace: FailureTrace | None = None,
                   topology: Topology | None = None) -> RunResult:
    """Execute one run.

    ``placement``, ``trace`` and ``topology`` override the generated ones,
    which is how scripted scenarios are replayed.

    Cost is sampled at ``ticks`` evenly spaced times ending at ``duration``.
    Events strictly earlier than a sampling time are applied before it; an
    event falling exactly on a sampling time is applied after that sample.
    """
    seed = config.base_seed if seed is None else int(seed)
    sched_rng, fail_rng = run_streams(seed)
    if topology is None:
        topology = build_topology(config.hierarchy, derive_dc_size(config))
    jobset = JobSet.from_config(config)
    if placement is None:
        placement = schedule(config.scheduler, jobset, topology, sched_rng)
    if trace is None:
        trace = plan_failures(topology, config.f_hw, config.duration, fail_rng)

    states = InstanceState(jobset, placement.services)
    J = jobset.jobs
    failed = np.zeros(J, dtype=bool)
    dirty = np.ones(J, dtype=bool)
    current = np.zeros(J, dtype=np.int64)
    accumulated = np.zeros(J, dtype=np.int64)
    tallies = {lvl: 0 for lvl in Level}
    per_job = jobset.tasks * jobset.redundancy

    events = [ev for ev in trace if ev.time <= config.duration]
    nxt = 0

    def apply(ev):
        killed = apply_failure(topology, states, ev)
        tallies[ev.level] += 1
        if killed.size:
            dirty[np.unique(killed // per_job)] = True

    for k in range(1, config.ticks + 1):
        tick = config.duration * k / config.ticks
        while nxt < len(events) and events[nxt].time < tick:
            apply(events[nxt])
            nxt += 1
        for j in np.flatnonzero(dirty & ~failed):
            if states.job_failed(j):
                failed[j] = True
            else:
                current[j] = job_network_cost(build_comm_graph(j, states, topology))
        dirty[:] = False
        accumulated[~failed] += current[~failed]
    for ev in events[nxt:]:
        apply(ev)

    success, rejected = evaluate_outcome(topology, states)
    return RunResult(
        seed=seed,
        rejected=rejected,
        job_success=success,
        job_cost=accumulated / config.ticks,
        failure_event_counts=tallies,
        surviving_fraction=float(np.count_nonzero(topology.alive_services)) / topology.service_count,
    )
