"""Per-job nearest-copy communication graphs and their cost."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topology import Topology
from .workload import InstanceState, JobSet, job_failed

_DEAD = np.iinfo(np.int64).max


@dataclass(frozen=True)
class CommGraph:
    """Undirected, deduplicated edges between instances of one job.

    ``edges`` holds flat instance indices, lower index first; ``costs`` the
    matching path costs.
    """

    job: int
    edges: np.ndarray
    costs: np.ndarray

    def __len__(self):
        return len(self.costs)

    def edge_set(self, jobset: JobSet) -> set:
        return {frozenset((jobset.instance(a), jobset.instance(b))) for a, b in self.edges}


def build_comm_graph(j: int, states: InstanceState, topology: Topology) -> CommGraph:
    """Link each live instance to the cheapest live copy of every other task row.

    Ties go to the lowest redundancy column.  Must not be called on a failed job.
    """
    jobset = states.jobset
    T, R = jobset.tasks, jobset.redundancy
    alive = jobset.job_matrix(states.alive, j)          # T x R
    if job_failed(alive):
        raise ValueError(f"job {j} has failed; it has no communication graph")
    if T == 1:
        empty = np.empty((0, 2), dtype=np.int64)
        return CommGraph(j, empty, np.empty(0, dtype=np.int64))

    offset = jobset.job_slice(j).start
    services = jobset.job_matrix(states.services, j)    # T x R
    src_t, src_r = np.nonzero(alive)                    # sorted by (t, r)
    src_service = services[src_t, src_r]

    cost = topology.cost_between(src_service[:, None, None], services[None, :, :])
    cost[:, ~alive] = _DEAD
    nearest_r = np.argmin(cost, axis=2)                 # first minimum = lowest column
    n_src = src_t.size
    rows = np.broadcast_to(np.arange(T), (n_src, T))
    keep = rows != src_t[:, None]

    a = offset + src_r * T + src_t                      # flat index of the source
    a = np.broadcast_to(a[:, None], (n_src, T))[keep]
    b = offset + nearest_r[keep] * T + rows[keep]
    c = np.take_along_axis(cost, nearest_r[:, :, None], axis=2)[:, :, 0][keep]

    lo, hi = np.minimum(a, b), np.maximum(a, b)
    _, first = np.unique(lo * jobset.size + hi, return_index=True)
    edges = np.stack([lo[first], hi[first]], axis=1)
    return CommGraph(j, edges, c[first])


def job_network_cost(graph: CommGraph) -> int:
    return int(graph.costs.sum())
