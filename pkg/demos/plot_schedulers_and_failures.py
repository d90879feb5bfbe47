"""
Scheduling and failure traces
=============================

Place the same job set three ways and replay one failure trace against
each placement.
"""

# %%
import numpy as np

from dcresilience import HierarchySpec, JobSet, Level, build_topology, plan_failures, schedule
from dcresilience.engine import run_streams
from dcresilience.failure import target_event_count

topo = build_topology(HierarchySpec(1, 2, 3, 8), 48)
jobs = JobSet(2, 3, 2)

# %%
# Pack fills services in order, Random scatters, Cluster drops each copy
# of a job onto its own blade.

for name in ("pack", "random", "cluster"):
    placement = schedule(name, jobs, topo, np.random.default_rng(1))
    blades = topo.unit_of(placement.services, Level.BLADE)
    print(f"{name:8s} blades per copy:", blades.reshape(-1, jobs.tasks).tolist())

# %%
# A failure trace
# ---------------
# The number of events targets a fraction of all hardware units.  Each
# event picks a level in proportion to how many live units it holds.

big = build_topology(HierarchySpec(8, 4, 16, 16), 2000)
print("target events:", target_event_count(big, 0.05))
_, fail_rng = run_streams(7)
trace = plan_failures(big, 0.05, 1.0, fail_rng)
print(len(trace), {lvl.name: n for lvl, n in trace.level_counts().items()})
print(trace.events[:3])
