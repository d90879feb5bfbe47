"""Data-centre hierarchy tree: addressing, unit bookkeeping and path costs.

The tree has five levels (aisle, rack, chassis, blade, service).  Services
are laid out as a prefix of the canonical address order, so every unit at
every level owns a contiguous run of service indices and a contiguous run of
descendant units at each lower level.  Units are identified by a global
0-based index per level, in canonical order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from .errors import ConfigError


class Level(IntEnum):
    """Hardware level.  Larger value means higher in the tree."""

    SERVICE = 0
    BLADE = 1
    CHASSIS = 2
    RACK = 3
    AISLE = 4


LEVELS_TOP_DOWN = (Level.AISLE, Level.RACK, Level.CHASSIS, Level.BLADE, Level.SERVICE)

# Relative communication cost when two services first diverge at a level.
LEVEL_COST = {level: 10 ** int(level) for level in Level}


@dataclass(frozen=True)
class HierarchySpec:
    """Branching factors below the aisle level (``h-a-b-c-d``)."""

    racks_per_aisle: int
    chassis_per_rack: int
    blades_per_chassis: int
    services_per_blade: int

    def __post_init__(self):
        for name in ("racks_per_aisle", "chassis_per_rack",
                     "blades_per_chassis", "services_per_blade"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"branching factor must be a positive integer, got {value!r}",
                                  key=name)

    @property
    def factors(self) -> tuple[int, int, int, int]:
        return (self.racks_per_aisle, self.chassis_per_rack,
                self.blades_per_chassis, self.services_per_blade)

    def capacity(self, level: Level) -> int:
        """Number of services in a fully populated unit at ``level``."""
        cap = 1
        a, b, c, d = self.factors
        for factor, lvl in ((d, Level.BLADE), (c, Level.CHASSIS),
                            (b, Level.RACK), (a, Level.AISLE)):
            if level >= lvl:
                cap *= factor
        return cap

    def __str__(self):
        return "-".join(str(f) for f in self.factors)


_HIER_RE = re.compile(r"^\s*(?:h-)?(\d+(?:-\d+)*)\s*$")


def parse_hierarchy(text: str) -> HierarchySpec:
    """Parse ``8-4-16-16``, ``h-8-4-16-16`` or the shorthands ``h-5``/``h-10``.

    A single factor ``h-n`` expands to ``n-n-n-n``.
    """
    m = _HIER_RE.match(str(text))
    if not m:
        raise ConfigError(f"malformed hierarchy {text!r}", key="hierarchy",
                          accepted="a-b-c-d, h-a-b-c-d, or h-n shorthand")
    parts = [int(p) for p in m.group(1).split("-")]
    if len(parts) == 1 and str(text).strip().startswith("h-"):
        parts = parts * 4
    if len(parts) != 4:
        raise ConfigError(f"malformed hierarchy {text!r}: expected 4 branching factors",
                          key="hierarchy", accepted="a-b-c-d, h-a-b-c-d, or h-n shorthand")
    if any(p < 1 for p in parts):
        raise ConfigError(f"branching factors must be >= 1 in {text!r}", key="hierarchy")
    return HierarchySpec(*parts)


class Address(NamedTuple):
    """Position of a service; each component is local to its parent unit."""

    aisle: int
    rack: int
    chassis: int
    blade: int
    service: int


def path_cost(a: Address, b: Address) -> int:
    """Communication cost between two services.

    Zero for the same service, otherwise ``10**L`` where ``L`` is the highest
    level at which the two addresses diverge.
    """
    for level, x, y in zip(LEVELS_TOP_DOWN, a, b):
        if x != y:
            return LEVEL_COST[level]
    return 0


class Topology:
    """A hierarchy tree holding exactly ``service_count`` services.

    Also carries per-unit alive/failed status.  Failing a unit fails its
    whole subtree.
    """

    def __init__(self, spec: HierarchySpec, service_count: int):
        if isinstance(service_count, bool) or not isinstance(service_count, (int, np.integer)) \
                or service_count < 1:
            raise ConfigError(f"service count must be a positive integer, got {service_count!r}",
                              key="service_count")
        self.spec = spec
        self.service_count = int(service_count)
        self._cap = np.array([spec.capacity(lvl) for lvl in Level], dtype=np.int64)
        self._counts = np.array([-(-self.service_count // int(c)) for c in self._cap],
                                dtype=np.int64)
        self._failed = [np.zeros(int(n), dtype=bool) for n in self._counts]
        self._alive = self._counts.copy()

    # -- structure -----------------------------------------------------

    @property
    def aisle_count(self) -> int:
        return int(self._counts[Level.AISLE])

    @property
    def counts(self) -> np.ndarray:
        """Unit counts indexed by ``Level`` value."""
        return self._counts.copy()

    @property
    def total_units(self) -> int:
        return int(self._counts.sum())

    def capacity(self, level: Level) -> int:
        return int(self._cap[level])

    def unit_counts(self) -> dict[Level, int]:
        return {lvl: int(self._counts[lvl]) for lvl in LEVELS_TOP_DOWN}

    def _check_unit(self, level, unit):
        level = Level(level)
        if not 0 <= unit < self._counts[level]:
            raise IndexError(f"no {level.name.lower()} with index {unit}")
        return level

    def service_range(self, level: Level, unit: int) -> tuple[int, int]:
        """Half-open range of service indices under a unit."""
        level = self._check_unit(level, unit)
        cap = int(self._cap[level])
        return unit * cap, min((unit + 1) * cap, self.service_count)

    def unit_of(self, service, level: Level):
        """Global index of the ancestor at ``level`` (vectorised over services)."""
        return np.asarray(service) // self._cap[level]

    def address(self, service: int) -> Address:
        if not 0 <= service < self.service_count:
            raise IndexError(f"no service with index {service}")
        a, b, c, d = self.spec.factors
        blade, s = divmod(int(service), d)
        chassis, bl = divmod(blade, c)
        rack, ch = divmod(chassis, b)
        aisle, rk = divmod(rack, a)
        return Address(aisle, rk, ch, bl, s)

    def service_index(self, addr: Address) -> int:
        a, b, c, d = self.spec.factors
        bounds = (None, a, b, c, d)
        for value, bound in zip(addr, bounds):
            if value < 0 or (bound is not None and value >= bound):
                raise IndexError(f"address {tuple(addr)} outside hierarchy {self.spec}")
        idx = (((addr.aisle * a + addr.rack) * b + addr.chassis) * c + addr.blade) * d + addr.service
        if idx >= self.service_count:
            raise IndexError(f"address {tuple(addr)} beyond the {self.service_count} services")
        return idx

    def subtree_services(self, level: Level, unit: int) -> list[Address]:
        start, stop = self.service_range(level, unit)
        return [self.address(s) for s in range(start, stop)]

    def path_cost(self, a: Address, b: Address) -> int:
        self.service_index(a)
        self.service_index(b)
        return path_cost(a, b)

    def cost_between(self, x, y) -> np.ndarray:
        """Vectorised path cost between service-index arrays (broadcasting)."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        cost = np.zeros(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
        for lvl in Level:
            cap = self._cap[lvl]
            cost[(x // cap) != (y // cap)] = LEVEL_COST[lvl]
        return cost

    # -- status --------------------------------------------------------

    def fail(self, level: Level, unit: int) -> tuple[int, int]:
        """Fail a unit and its subtree.  Returns its service range.

        Failing an already-failed unit is a no-op.
        """
        start, stop = self.service_range(level, unit)
        for lvl in Level:
            if lvl > level:
                break
            cap = self._cap[lvl]
            lo, hi = start // cap, (stop - 1) // cap + 1
            seg = self._failed[lvl][lo:hi]
            self._alive[lvl] -= hi - lo - int(np.count_nonzero(seg))
            seg[:] = True
        return start, stop

    def is_failed(self, level: Level, unit: int) -> bool:
        level = self._check_unit(level, unit)
        return bool(self._failed[level][unit])

    def alive_counts(self) -> np.ndarray:
        """Alive unit counts indexed by ``Level`` value."""
        return self._alive.copy()

    def alive_units(self, level: Level) -> np.ndarray:
        return np.flatnonzero(~self._failed[level])

    @property
    def alive_services(self) -> np.ndarray:
        """Boolean mask over services."""
        return ~self._failed[Level.SERVICE]

    @property
    def all_failed(self) -> bool:
        return self._alive[Level.SERVICE] == 0

    def reset(self):
        for arr in self._failed:
            arr[:] = False
        self._alive = self._counts.copy()

    def copy(self) -> "Topology":
        new = Topology.__new__(Topology)
        new.spec = self.spec
        new.service_count = self.service_count
        new._cap = self._cap
        new._counts = self._counts
        new._failed = [arr.copy() for arr in self._failed]
        new._alive = self._alive.copy()
        return new

    def __repr__(self):
        return f"Topology(h-{self.spec}, services={self.service_count})"


def build_topology(spec: HierarchySpec, service_count: int) -> Topology:
    return Topology(spec, service_count)


def unit_counts(topology: Topology) -> dict[Level, int]:
    """Existing units per level; a unit exists iff it holds at least one service."""
    return topology.unit_counts()


def subtree_services(topology: Topology, level: Level, unit: int) -> list[Address]:
    return topology.subtree_services(level, unit)
