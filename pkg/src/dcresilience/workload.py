"""Jobs as T x R task-instance matrices, data-centre sizing, job failure.

Instances are numbered by a flat index ``(j * R + r) * T + t``: job-major,
then redundancy column, then task row.  A redundancy group (one column of
one job) is therefore a contiguous block of ``T`` instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError
from .topology import HierarchySpec, parse_hierarchy


class Sizing(str, Enum):
    VARIABLE = "variable"
    FIXED = "fixed"


SCHEDULER_NAMES = ("random", "pack", "cluster")


def _positive_int(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"must be a positive integer, got {value!r}", key=key)
    return int(value)


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario; ``base_seed + rep`` seeds each repetition."""

    jobs: int = 10
    tasks: int = 10
    redundancy: int = 1
    f_hw: float = 0.05
    hierarchy: HierarchySpec = field(default_factory=lambda: HierarchySpec(8, 4, 16, 16))
    sizing: Sizing = Sizing.FIXED
    scheduler: str = "cluster"
    duration: float = 1.0
    ticks: int = 100
    base_seed: int = 0
    repetitions: int = 30

    def __post_init__(self):
        for key in ("jobs", "tasks", "redundancy", "ticks", "repetitions"):
            object.__setattr__(self, key, _positive_int(getattr(self, key), key))
        f_hw = float(self.f_hw)
        if not 0.0 < f_hw < 1.0:
            raise ConfigError(f"must lie in (0, 1), got {self.f_hw!r}", key="failure_fraction")
        object.__setattr__(self, "f_hw", f_hw)
        if not float(self.duration) > 0:
            raise ConfigError(f"must be positive, got {self.duration!r}", key="duration")
        object.__setattr__(self, "duration", float(self.duration))
        if isinstance(self.hierarchy, str):
            object.__setattr__(self, "hierarchy", parse_hierarchy(self.hierarchy))
        try:
            object.__setattr__(self, "sizing", Sizing(self.sizing))
        except ValueError:
            raise ConfigError(f"unknown sizing {self.sizing!r}", key="sizing",
                              accepted="variable, fixed") from None
        if self.scheduler not in SCHEDULER_NAMES:
            raise ConfigError(f"unknown scheduler {self.scheduler!r}", key="scheduler",
                              accepted=", ".join(SCHEDULER_NAMES))
        seed = self.base_seed
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) \
                or not 0 <= seed < 2 ** 64:
            raise ConfigError(f"must be an unsigned 64-bit integer, got {seed!r}", key="seed")
        if derive_dc_size(self) < self.total_tasks:
            raise ConfigError(f"{self.total_tasks} task instances exceed the "
                              f"{derive_dc_size(self)} services of a {self.sizing.value} "
                              f"data centre", key="redundancy")

    @property
    def total_tasks(self) -> int:
        """``#T = J * T * R``."""
        return self.jobs * self.tasks * self.redundancy


def derive_dc_size(config: ScenarioConfig) -> int:
    """Service count: ``2*J*T*R`` for variable sizing, ``20*J*T`` for fixed."""
    if config.sizing is Sizing.VARIABLE:
        return 2 * config.jobs * config.tasks * config.redundancy
    return 20 * config.jobs * config.tasks


@dataclass(frozen=True)
class JobSet:
    jobs: int
    tasks: int
    redundancy: int

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "JobSet":
        return cls(config.jobs, config.tasks, config.redundancy)

    @property
    def size(self) -> int:
        return self.jobs * self.tasks * self.redundancy

    @property
    def group_count(self) -> int:
        return self.jobs * self.redundancy

    def index(self, j: int, t: int, r: int) -> int:
        if not (0 <= j < self.jobs and 0 <= t < self.tasks and 0 <= r < self.redundancy):
            raise IndexError(f"instance {(j, t, r)} outside {self}")
        return (j * self.redundancy + r) * self.tasks + t

    def instance(self, index: int) -> tuple[int, int, int]:
        jr, t = divmod(int(index), self.tasks)
        j, r = divmod(jr, self.redundancy)
        return j, t, r

    def instances(self):
        """All ``(j, t, r)`` identifiers in flat-index order."""
        return [self.instance(i) for i in range(self.size)]

    def job_slice(self, j: int) -> slice:
        n = self.tasks * self.redundancy
        return slice(j * n, (j + 1) * n)

    def job_matrix(self, values, j: int) -> np.ndarray:
        """View of a per-instance array for job ``j`` as a T x R matrix."""
        block = np.asarray(values)[self.job_slice(j)]
        return block.reshape(self.redundancy, self.tasks).T


def job_failed(alive) -> bool:
    """A job fails iff some task row has no live copy.

    ``alive`` is the job's T x R liveness matrix.
    """
    alive = np.asarray(alive, dtype=bool)
    return not bool(alive.any(axis=1).all())


class InstanceState:
    """Per-instance liveness and host service for one run."""

    def __init__(self, jobset: JobSet, services):
        self.jobset = jobset
        self.services = np.asarray(services, dtype=np.int64)
        if self.services.shape != (jobset.size,):
            raise ValueError("placement does not cover every instance")
        self.alive = np.ones(jobset.size, dtype=bool)

    def job_alive(self, j: int) -> np.ndarray:
        return self.jobset.job_matrix(self.alive, j)

    def job_failed(self, j: int) -> bool:
        return job_failed(self.job_alive(j))
