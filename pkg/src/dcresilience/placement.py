"""Scheduling algorithms mapping every task instance to a distinct service."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .topology import Address, Level, Topology
from .workload import SCHEDULER_NAMES, JobSet


@dataclass(frozen=True)
class Placement:
    """Host service index for every instance, in flat-index order."""

    jobset: JobSet
    services: np.ndarray

    def __getitem__(self, instance) -> int:
        j, t, r = instance
        return int(self.services[self.jobset.index(j, t, r)])

    def address(self, topology: Topology, instance) -> Address:
        return topology.address(self[instance])

    def is_injective(self) -> bool:
        return np.unique(self.services).size == self.services.size


def _check_capacity(jobs: JobSet, topology: Topology):
    if jobs.size > topology.service_count:
        raise ConfigError(f"{jobs.size} task instances do not fit on "
                          f"{topology.service_count} services", key="service_count")


def schedule_random(jobs: JobSet, topology: Topology, rng: np.random.Generator) -> Placement:
    """Uniform sampling without replacement, blind to job and group."""
    _check_capacity(jobs, topology)
    services = rng.choice(topology.service_count, size=jobs.size, replace=False)
    return Placement(jobs, services.astype(np.int64))


def schedule_pack(jobs: JobSet, topology: Topology, rng=None) -> Placement:
    """Consecutive instances on consecutive services from the first one."""
    _check_capacity(jobs, topology)
    return Placement(jobs, np.arange(jobs.size, dtype=np.int64))


def fit_level(topology: Topology, group_size: int):
    """Smallest level whose full-unit capacity holds ``group_size`` services."""
    for level in Level:
        if topology.capacity(level) >= group_size:
            return level
    return None


def schedule_cluster(jobs: JobSet, topology: Topology, rng: np.random.Generator) -> Placement:
    """Each redundancy group on the smallest hardware unit it fits, units chosen uniformly.

    Groups are placed in (job, column) order.  Level choice uses full-unit
    capacity; free space only decides which units at that level are eligible.
    If no unit at the fitting level has room, larger levels are tried.  When
    nothing has room for a whole group, as many instances as possible go on
    the fitting-level unit with the most free services and the rest are added
    one at a time on the free service with the lowest summed cost to the
    members already placed (ties to the lowest service index).
    """
    _check_capacity(jobs, topology)
    n = topology.service_count
    size = jobs.tasks
    free = np.ones(n, dtype=bool)
    all_services = np.arange(n)
    unit_index = {lvl: topology.unit_of(all_services, lvl) for lvl in Level}
    counts = topology.counts
    base = fit_level(topology, size)
    levels = [lvl for lvl in Level if base is not None and lvl >= base]
    services = np.empty(jobs.size, dtype=np.int64)

    for g in range(jobs.group_count):
        chosen = None
        for lvl in levels:
            free_per_unit = np.bincount(unit_index[lvl], weights=free, minlength=counts[lvl])
            eligible = np.flatnonzero(free_per_unit >= size)
            if eligible.size:
                unit = int(eligible[rng.integers(eligible.size)])
                start, stop = topology.service_range(lvl, unit)
                chosen = start + np.flatnonzero(free[start:stop])[:size]
                break
        if chosen is None:
            chosen = _overflow(topology, free, unit_index, base or Level.AISLE, size)
        free[chosen] = False
        services[g * size:(g + 1) * size] = chosen
    return Placement(jobs, services)


def _overflow(topology, free, unit_index, level, size):
    free_per_unit = np.bincount(unit_index[level], weights=free,
                                minlength=topology.counts[level])
    unit = int(np.argmax(free_per_unit))
    start, stop = topology.service_range(level, unit)
    placed = list(start + np.flatnonzero(free[start:stop])[:size])
    free = free.copy()
    free[placed] = False
    while len(placed) < size:
        candidates = np.flatnonzero(free)
        totals = topology.cost_between(candidates[:, None], np.asarray(placed)[None, :]).sum(axis=1)
        best = int(candidates[np.argmin(totals)])
        placed.append(best)
        free[best] = False
    return np.asarray(placed, dtype=np.int64)


SCHEDULERS = {
    "random": schedule_random,
    "pack": schedule_pack,
    "cluster": schedule_cluster,
}
assert tuple(SCHEDULERS) == SCHEDULER_NAMES


def schedule(name: str, jobs: JobSet, topology: Topology, rng: np.random.Generator) -> Placement:
    try:
        func = SCHEDULERS[name]
    except KeyError:
        raise ConfigError(f"unknown scheduler {name!r}", key="scheduler",
                          accepted=", ".join(SCHEDULER_NAMES)) from None
    return func(jobs, topology, rng)
