import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcresilience.commnet import build_comm_graph, job_network_cost
from dcresilience.failure import FailureEvent, apply_failure
from dcresilience.topology import HierarchySpec, Level, build_topology, path_cost
from dcresilience.workload import InstanceState, JobSet

TWO_BLADES = HierarchySpec(1, 1, 2, 3)   # one chassis, two blades of three


def nearest_copy_oracle(j, states, topo):
    """Loop-by-loop nearest-copy graph on Address tuples."""
    js = states.jobset
    edges = {}
    for t in range(js.tasks):
        for r in range(js.redundancy):
            a = js.index(j, t, r)
            if not states.alive[a]:
                continue
            addr_a = topo.address(int(states.services[a]))
            for t2 in range(js.tasks):
                if t2 == t:
                    continue
                best = None
                for r2 in range(js.redundancy):
                    b = js.index(j, t2, r2)
                    if not states.alive[b]:
                        continue
                    c = path_cost(addr_a, topo.address(int(states.services[b])))
                    if best is None or c < best[0]:
                        best = (c, b)
                edges[frozenset((a, best[1]))] = best[0]
    return edges


def two_blade_states():
    jobs = JobSet(1, 3, 2)
    topo = build_topology(TWO_BLADES, 6)
    return topo, InstanceState(jobs, np.arange(6))   # column 0 on blade 0, column 1 on blade 1


def test_two_blade_initial_cost():
    topo, st_ = two_blade_states()
    g = build_comm_graph(0, st_, topo)
    assert len(g) == 6
    assert sorted(g.costs.tolist()) == [1] * 6
    assert job_network_cost(g) == 6


def test_two_blade_after_task_failure():
    topo, st_ = two_blade_states()
    apply_failure(topo, st_, FailureEvent(0.5, Level.SERVICE, st_.jobset.index(0, 1, 0)))
    g = build_comm_graph(0, st_, topo)
    assert sorted(g.costs.tolist()) == [1, 1, 1, 1, 10, 10]
    assert job_network_cost(g) == 24


def test_single_row_job_has_empty_graph():
    topo = build_topology(TWO_BLADES, 6)
    st_ = InstanceState(JobSet(1, 1, 3), np.array([0, 2, 4]))
    g = build_comm_graph(0, st_, topo)
    assert len(g) == 0 and job_network_cost(g) == 0


def test_failed_job_rejected():
    topo, st_ = two_blade_states()
    st_.alive[[st_.jobset.index(0, 2, 0), st_.jobset.index(0, 2, 1)]] = False
    with pytest.raises(ValueError):
        build_comm_graph(0, st_, topo)


@settings(max_examples=80, deadline=None)
@given(J=st.integers(1, 3), T=st.integers(1, 6), R=st.integers(1, 5),
       seed=st.integers(0, 10_000), kill=st.floats(0, 0.6))
def test_matches_bruteforce_oracle(J, T, R, seed, kill):
    rng = np.random.default_rng(seed)
    jobs = JobSet(J, T, R)
    topo = build_topology(HierarchySpec(2, 2, 3, 3), jobs.size + 40)
    st_ = InstanceState(jobs, rng.choice(topo.service_count, jobs.size, replace=False))
    st_.alive &= rng.random(jobs.size) >= kill
    for j in range(J):
        if st_.job_failed(j):
            continue
        g = build_comm_graph(j, st_, topo)
        got = {frozenset(map(int, e)): int(c) for e, c in zip(g.edges, g.costs)}
        assert got == nearest_copy_oracle(j, st_, topo)


def test_every_live_instance_reaches_every_other_live_row():
    rng = np.random.default_rng(4)
    jobs = JobSet(1, 5, 4)
    topo = build_topology(HierarchySpec(2, 2, 3, 3), 60)
    st_ = InstanceState(jobs, rng.choice(60, 20, replace=False))
    st_.alive[[0, 6, 13]] = False
    g = build_comm_graph(0, st_, topo)
    for a in np.flatnonzero(st_.alive):
        ta = jobs.instance(a)[1]
        partners = {jobs.instance(y if x == a else x)[1] for x, y in g.edges if a in (x, y)}
        assert partners == set(range(5)) - {ta}


def test_nearest_distance_never_decreases():
    rng = np.random.default_rng(8)
    jobs = JobSet(1, 6, 4)
    topo = build_topology(HierarchySpec(2, 2, 3, 3), 80)
    st_ = InstanceState(jobs, rng.choice(80, 24, replace=False))

    def nearest(a):
        # cheapest incident edge per row is the instance's own nearest-copy choice
        g = build_comm_graph(0, st_, topo)
        out = {}
        for (x, y), c in zip(g.edges, g.costs):
            if a in (x, y):
                t2 = jobs.instance(y if x == a else x)[1]
                out[t2] = min(out.get(t2, c), c)
        return out

    order = rng.permutation(24)
    for victim in order:
        before = {a: nearest(a) for a in np.flatnonzero(st_.alive)}
        st_.alive[victim] = False
        if st_.job_failed(0):
            break
        for a, dists in before.items():
            if st_.alive[a]:
                after = nearest(a)
                assert all(after[t] >= dists[t] for t in after)


def test_colocated_job_costs_at_most_one():
    topo = build_topology(HierarchySpec(1, 1, 1, 12), 12)
    st_ = InstanceState(JobSet(1, 4, 3), np.arange(12))
    assert build_comm_graph(0, st_, topo).costs.max() <= 1


def test_cost_invariant_under_column_relabel():
    rng = np.random.default_rng(21)
    jobs = JobSet(1, 5, 4)
    topo = build_topology(HierarchySpec(2, 2, 3, 3), 60)
    services = rng.choice(60, 20, replace=False)
    alive = rng.random(20) > 0.3
    alive[:5] = True
    st_ = InstanceState(jobs, services)
    st_.alive[:] = alive
    base = job_network_cost(build_comm_graph(0, st_, topo))
    perm = rng.permutation(4)
    idx = np.array([jobs.index(0, t, perm[r]) for r in range(4) for t in range(5)])
    st2 = InstanceState(jobs, services[idx])
    st2.alive[:] = alive[idx]
    assert job_network_cost(build_comm_graph(0, st2, topo)) == base
