"""Repetitions, sweeps, confidence intervals and cost normalisation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .engine import RunResult, run_simulation
from .workload import ScenarioConfig

Z95 = 1.96


def aggregate(values) -> tuple[float, float]:
    """Mean and 95% CI half-width (normal approximation, ``1.96 * SD / sqrt(n)``)."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("cannot aggregate an empty sample")
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, 0.0
    sd = float(arr.std(ddof=1))
    return mean, Z95 * sd / math.sqrt(arr.size)


def scenario_id(config: ScenarioConfig) -> str:
    return (f"{config.scheduler}_h{config.hierarchy}_{config.sizing.value}"
            f"_J{config.jobs}_T{config.tasks}_R{config.redundancy}_f{config.f_hw:g}")


@dataclass
class Aggregate:
    config: ScenarioConfig
    reps_total: int
    reps_rejected: int
    S_J: tuple[float, float] | None
    C_J: tuple[float, float] | None

    @property
    def reportable(self) -> bool:
        return self.reps_total > self.reps_rejected

    @property
    def scenario_id(self) -> str:
        return scenario_id(self.config)


def summarize(config: ScenarioConfig, runs: list[RunResult]) -> Aggregate:
    """Aggregate non-rejected runs.

    C_J is the mean over runs of each run's per-successful-job mean, taken
    over runs with at least one successful job.
    """
    kept = [r for r in runs if not r.rejected]
    s_j = aggregate(r.S_J for r in kept) if kept else None
    costs = [r.C_J for r in kept if r.C_J is not None]
    c_j = aggregate(costs) if costs else None
    return Aggregate(config, len(runs), len(runs) - len(kept), s_j, c_j)


def _run_one(args):
    config, seed = args
    return run_simulation(config, seed)


def _pool_map(tasks, workers):
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def run_sweep(configs, workers: int | None = None) -> list[tuple[Aggregate, list[RunResult]]]:
    """Run every scenario for its configured repetitions.

    Rep ``i`` of a scenario uses seed ``base_seed + i``.  Output order follows
    ``configs`` then rep index regardless of completion order.
    """
    configs = list(configs)
    tasks = [(cfg, (cfg.base_seed + rep) % 2 ** 64)
             for cfg in configs for rep in range(cfg.repetitions)]
    results = _pool_map(tasks, workers)
    out, pos = [], 0
    for cfg in configs:
        runs = results[pos:pos + cfg.repetitions]
        pos += cfg.repetitions
        out.append((summarize(cfg, runs), runs))
    return out


def run_scenario(config: ScenarioConfig, repetitions: int | None = None,
                 workers: int | None = 1) -> tuple[Aggregate, list[RunResult]]:
    if repetitions is not None:
        if repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        config = replace(config, repetitions=repetitions)
    return run_sweep([config], workers)[0]


def normalize_costs(series: dict) -> dict:
    """Divide each cost by the cost at the largest key (R_max -> 1.0)."""
    if not series:
        raise ValueError("empty cost series")
    ref_key = max(series)
    ref = series[ref_key]
    if ref is None or not ref > 0:
        raise ValueError(f"reference cost at {ref_key} must be positive, got {ref!r}")
    return {k: v / ref for k, v in series.items()}


def linear_r_squared(x, y) -> float:
    """Coefficient of determination of a least-squares line through ``(x, y)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0:
        return 1.0
    return 1.0 - float((resid ** 2).sum()) / ss_tot
