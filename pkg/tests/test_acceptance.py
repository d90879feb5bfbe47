"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (also collected in the
terminal summary).  Repetition counts and base seeds are fixed up front.
Statistical criteria run at desk scale, so the whole module takes a few
minutes on one core.
"""

import functools
import itertools

import numpy as np
from scipy import stats

from dcresilience.cli import main
from dcresilience.commnet import build_comm_graph, job_network_cost
from dcresilience.experiment import linear_r_squared, run_sweep
from dcresilience.failure import FailureEvent, apply_failure, plan_failures, target_event_count
from dcresilience.topology import HierarchySpec, Level, build_topology
from dcresilience.workload import InstanceState, JobSet, ScenarioConfig, job_failed

H8 = HierarchySpec(8, 4, 16, 16)
H5 = HierarchySpec(5, 5, 5, 5)
SEED = 0


@functools.lru_cache(maxsize=None)
def scenario(cfg: ScenarioConfig):
    return run_sweep([cfg])[0]


def agg(scheduler, R, reps, **kw):
    return scenario(ScenarioConfig(scheduler=scheduler, redundancy=R, repetitions=reps,
                                   base_seed=SEED, **kw))[0]


def fmt(pair):
    return f"{pair[0]:.3f}±{pair[1]:.3f}"


# 1 ----------------------------------------------------------------------------

def test_c01_two_blade_costs(verdict):
    topo = build_topology(HierarchySpec(1, 1, 2, 3), 6)
    jobs = JobSet(1, 3, 2)
    states = InstanceState(jobs, np.arange(6))        # copy 0 on blade 0, copy 1 on blade 1
    before = job_network_cost(build_comm_graph(0, states, topo))
    apply_failure(topo, states, FailureEvent(0.5, Level.SERVICE, jobs.index(0, 1, 0)))
    after = job_network_cost(build_comm_graph(0, states, topo))
    verdict("C1 two-blade layout cost 6 -> 24", (before, after) == (6, 24),
            f"before={before} after={after}")


# 2 ----------------------------------------------------------------------------

def test_c02_failure_predicate(verdict):
    rng = np.random.default_rng(SEED)
    bad = 0
    for _ in range(10_000):
        T, R = int(rng.integers(1, 9)), int(rng.integers(1, 6))
        alive = rng.random((T, R)) >= rng.random()
        oracle = any(not alive[t].any() for t in range(T))
        got = job_failed(alive)
        extra = alive & (rng.random((T, R)) >= 0.3)      # strictly more kills
        bad += (got != oracle) or (got and not job_failed(extra))
    verdict("C2 job-failure predicate over 10^4 kill sets", bad == 0, f"mismatches={bad}")


# 3 ----------------------------------------------------------------------------

C3_R = (1, 2, 3, 5, 7, 10)
C3_KW = dict(hierarchy=H8, sizing="fixed", jobs=10, tasks=10, f_hw=0.10)


def test_c03_resilience_shape(verdict):
    res = {(s, R): agg(s, R, 50, **C3_KW).S_J
           for s in ("random", "pack", "cluster") for R in C3_R}
    problems = []
    for s in ("random", "cluster"):
        for lo, hi in zip(C3_R, C3_R[1:]):
            (m0, c0), (m1, c1) = res[s, lo], res[s, hi]
            if m1 + c1 < m0 - c0:
                problems.append(f"{s} drops R{lo}->R{hi}")
    for R in C3_R:
        for s in ("random", "pack"):
            m, c = res[s, R]
            if res["cluster", R][0] < m - c:
                problems.append(f"cluster<{s} at R{R}")
    table = " ".join(f"R{R}:" + "/".join(f"{res[s, R][0]:.3f}" for s in ("random", "pack", "cluster"))
                     for R in C3_R)
    verdict("C3 S_J monotone in R and cluster most resilient", not problems,
            "; ".join(problems) or f"random/pack/cluster {table}")


# 4 ----------------------------------------------------------------------------

def test_c04_pack_plateau(verdict):
    rows = {R: (agg("pack", R, 200, **C3_KW).S_J, agg("cluster", R, 200, **C3_KW).S_J)
            for R in (7, 8, 9, 10)}
    ok = all(p[0] < 0.97 < c[0] for p, c in rows.values())
    verdict("C4 pack S_J < 0.97 < cluster S_J for R 7..10", ok,
            " ".join(f"R{R}: pack {fmt(p)} cluster {fmt(c)}" for R, (p, c) in rows.items()))


# 5 ----------------------------------------------------------------------------

def test_c05_pack_hierarchy_dip(verdict):
    kw = dict(hierarchy=H5, sizing="variable", jobs=10, tasks=10, f_hw=0.10)
    pack = {R: agg("pack", R, 200, **kw).S_J for R in (4, 5, 6)}
    clus = {R: agg("cluster", R, 200, **kw).S_J for R in (4, 5, 6)}
    dip = pack[5][0] < pack[4][0] and pack[5][0] < pack[6][0]
    flat = all(abs(clus[5][0] - clus[R][0]) <= clus[5][1] + clus[R][1] for R in (4, 6))
    verdict("C5 pack dips at R=5 on h-5, cluster does not", dip and flat,
            "pack " + " ".join(fmt(pack[R]) for R in (4, 5, 6))
            + " | cluster " + " ".join(fmt(clus[R]) for R in (4, 5, 6)))


# 6, 7 -------------------------------------------------------------------------

COST_KW = dict(hierarchy=H8, jobs=10, tasks=10, f_hw=0.05)


def cost(scheduler, R, sizing="fixed"):
    return agg(scheduler, R, 30, sizing=sizing, **COST_KW).C_J[0]


def test_c06_cost_ordering(verdict):
    c = {(s, R): cost(s, R) for s in ("random", "pack", "cluster") for R in (1, 2, 5, 10)}
    ordered = all(c["random", R] > c["cluster", R] > c["pack", R] for R in (2, 5, 10))
    base = c["cluster", 1] <= c["pack", 1]
    verdict("C6 C_J random > cluster > pack at R 2,5,10; cluster <= pack at R=1",
            ordered and base,
            " ".join(f"R{R}:" + "/".join(f"{c[s, R]:.0f}" for s in ("random", "cluster", "pack"))
                     for R in (1, 2, 5, 10)))


def test_c07_cluster_cost_flat(verdict):
    ratio = cost("cluster", 10) / cost("cluster", 2)
    verdict("C7 cluster C_J(R=10)/C_J(R=2) in [0.75, 1.33]", 0.75 <= ratio <= 1.33,
            f"ratio={ratio:.3f}")


# 8 ----------------------------------------------------------------------------

def test_c08_linear_cost_scaling(verdict):
    series = [("random", "fixed"), ("pack", "fixed"), ("random", "variable"),
              ("pack", "variable"), ("cluster", "variable")]
    rs = np.arange(1, 11)
    r2 = {}
    for s, sizing in series:
        r2[s, sizing] = linear_r_squared(rs, [cost(s, int(R), sizing) for R in rs])
    verdict("C8 C_J linear in R (R^2 >= 0.98)", all(v >= 0.98 for v in r2.values()),
            " ".join(f"{s}/{z}={v:.3f}" for (s, z), v in r2.items()))


# 9 ----------------------------------------------------------------------------

def test_c09_single_task_baseline(verdict):
    cfg = ScenarioConfig(jobs=100, tasks=1, redundancy=1, f_hw=0.10, scheduler="random",
                         repetitions=200, base_seed=SEED)
    aggregate_, runs = scenario(cfg)
    surviving = np.mean([r.surviving_fraction for r in runs if not r.rejected])
    gap = abs(aggregate_.S_J[0] - surviving)
    verdict("C9 T=1,R=1 S_J within 0.03 of surviving-service fraction", gap <= 0.03,
            f"S_J={aggregate_.S_J[0]:.4f} surviving={surviving:.4f}")


# 10 ---------------------------------------------------------------------------

def test_c10_failure_statistics(verdict):
    rng = np.random.default_rng(SEED)
    small = build_topology(HierarchySpec(2, 2, 2, 3), 24)
    expected = np.array([small.counts[lvl] for lvl in Level], dtype=float)
    seen = np.zeros(len(Level))
    n = 0
    while n < 10_000:
        trace = plan_failures(small, 0.2, 1.0, rng)
        if len(trace):
            seen[trace.events[0].level] += 1
            n += 1
    p = stats.chisquare(seen, expected / expected.sum() * n).pvalue

    wide = build_topology(HierarchySpec(2, 2, 2, 3), 240)
    n_f = target_event_count(wide, 0.05)
    mean = np.mean([len(plan_failures(wide, 0.05, 1.0, rng)) for _ in range(1000)])
    rel = abs(mean - n_f) / n_f
    verdict("C10 first-event level chi-squared p > 0.01 and event count within 5% of N_f",
            p > 0.01 and rel <= 0.05, f"p={p:.3f} mean_events={mean:.2f} N_f={n_f}")


# 11 ---------------------------------------------------------------------------

def test_c11_byte_identical_runs(tmp_path, verdict):
    argv = ["--scheduler", "random,pack,cluster", "--redundancy", "1,3", "--failure-fraction",
            "0.1", "--reps", "5", "--seed", "12345"]
    codes = [main(argv + ["--out", str(tmp_path / d)]) for d in ("a", "b")]
    a, b = ((tmp_path / d / "runs.csv").read_bytes() for d in ("a", "b"))
    verdict("C11 equal seeds give byte-identical runs.csv", codes == [0, 0] and a == b,
            f"{len(a)} bytes")
