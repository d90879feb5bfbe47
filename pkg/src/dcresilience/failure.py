"""Hardware failure traces and cascading failure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .topology import Level, Topology
from .workload import InstanceState


@dataclass(frozen=True)
class FailureEvent:
    time: float
    level: Level
    unit: int


@dataclass
class FailureTrace:
    """Time-ordered failure events plus the targeted event count ``N_f``."""

    events: list[FailureEvent] = field(default_factory=list)
    target_count: int = 0

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def level_counts(self) -> dict[Level, int]:
        counts = {lvl: 0 for lvl in Level}
        for ev in self.events:
            counts[ev.level] += 1
        return counts


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def target_event_count(topology: Topology, f_hw: float) -> int:
    """``round(f_hw * h_all)`` where ``h_all`` counts units at all five levels."""
    return round_half_away(f_hw * topology.total_units)


def plan_failures(topology: Topology, f_hw: float, duration: float,
                  rng: np.random.Generator) -> FailureTrace:
    """Draw a failure trace for one run.

    Event times form a Poisson process of rate ``N_f / duration`` truncated
    at ``duration``.  Each event picks a level with probability proportional
    to its alive unit count, then an alive unit of that level uniformly.
    Units are drawn in time order against a private copy of the topology
    status, so cascades from earlier events are respected; ``topology``
    itself is not modified.
    """
    if not 0.0 < f_hw < 1.0:
        raise ConfigError(f"must lie in (0, 1), got {f_hw!r}", key="failure_fraction")
    n_target = target_event_count(topology, f_hw)
    trace = FailureTrace(target_count=n_target)
    if n_target == 0:
        return trace

    scale = duration / n_target
    times = []
    t = rng.exponential(scale)
    while t <= duration:
        times.append(t)
        t += rng.exponential(scale)

    work = topology.copy()
    for t in times:
        alive = work.alive_counts()
        total = int(alive.sum())
        if total == 0:
            break
        pick = rng.random() * total
        level = Level(int(np.searchsorted(np.cumsum(alive), pick, side="right")))
        candidates = work.alive_units(level)
        unit = int(candidates[rng.integers(candidates.size)])
        work.fail(level, unit)
        trace.events.append(FailureEvent(float(t), level, unit))
    return trace


def apply_failure(topology: Topology, states: InstanceState, event: FailureEvent) -> np.ndarray:
    """Fail the event's unit and subtree; kill every instance hosted there.

    Returns flat indices of instances killed by this event (empty when the
    unit was already down).
    """
    start, stop = topology.fail(event.level, event.unit)
    hit = (states.services >= start) & (states.services < stop) & states.alive
    killed = np.flatnonzero(hit)
    states.alive[killed] = False
    return killed
