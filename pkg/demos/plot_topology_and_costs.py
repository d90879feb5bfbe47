"""
Tree topology and communication cost
====================================

Build a small data centre, look up addresses and costs, then watch a
job's communication graph rewire after one of its tasks dies.
"""

# %%
# A tree of aisles, racks, chassis, blades and services
# -----------------------------------------------------
# ``1-1-2-3`` means one rack per aisle, one chassis per rack, two blades
# per chassis and three services per blade.

import numpy as np

from dcresilience import (FailureEvent, HierarchySpec, InstanceState, JobSet, Level,
                          apply_failure, build_comm_graph, build_topology, job_network_cost)

topo = build_topology(HierarchySpec(1, 1, 2, 3), 6)
print(topo.unit_counts())
print(topo.address(4))

# %%
# Costs grow by a factor of ten per level of the lowest shared ancestor.

print(topo.cost_between(np.arange(6)[:, None], np.arange(6)))

# %%
# One job, three tasks, two copies
# --------------------------------
# Copy 0 sits on blade 0 and copy 1 on blade 1.  Each instance talks to
# the nearest copy of every other task, so both triangles stay local.

jobs = JobSet(1, 3, 2)
states = InstanceState(jobs, np.arange(6))
graph = build_comm_graph(0, states, topo)
print(graph.edges.tolist(), job_network_cost(graph))

# %%
# Kill task 1 of copy 0.  The orphaned partners on blade 0 now reach
# across to blade 1, and two edges jump from cost 1 to cost 10.

apply_failure(topo, states, FailureEvent(0.5, Level.SERVICE, jobs.index(0, 1, 0)))
graph = build_comm_graph(0, states, topo)
print(graph.costs.tolist(), job_network_cost(graph))
