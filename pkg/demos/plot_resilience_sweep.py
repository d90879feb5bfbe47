"""
Resilience and cost against redundancy
======================================

A short sweep over redundancy for all three schedulers.  Each scenario
runs a handful of seeded repetitions and reports means with 95% CIs.
"""

# %%
from dcresilience import ScenarioConfig, run_sweep

configs = [ScenarioConfig(scheduler=s, redundancy=r, f_hw=0.10, repetitions=8, ticks=20)
           for s in ("random", "pack", "cluster") for r in (1, 3, 6)]
results = run_sweep(configs)

# %%
# Rejected runs (the whole data centre died) are left out of the means.

for agg, runs in results:
    s, c = agg.S_J, agg.C_J
    print(f"{agg.scenario_id:45s} S_J={s[0]:.2f}±{s[1]:.2f} "
          f"C_J={c[0]:9.1f} rejected={agg.reps_rejected}/{agg.reps_total}")

# %%
# The same sweep from the shell writes CSV files for plotting::
#
#     dcresilience --scheduler random,pack,cluster --redundancy 1..10 \
#         --failure-fraction 0.1 --reps 30 --out results
