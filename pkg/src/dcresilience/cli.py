"""Command-line front end: parse a sweep, run it, write CSV results.

Config files hold flat ``key = value`` lines; ``#`` starts a comment,
lists are comma separated and integer ranges are written ``a..b``::

    hierarchy = 8-4-16-16
    sizing = fixed
    scheduler = random, pack, cluster
    jobs = 10
    tasks = 10
    redundancy = 1..10
    failure_fraction = 0.05, 0.10
    repetitions = 30
    seed = 1
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import sys
import tempfile
from dataclasses import dataclass, field

from .errors import ConfigError
from .experiment import normalize_costs, run_sweep, scenario_id
from .topology import HierarchySpec, Level, parse_hierarchy
from .workload import SCHEDULER_NAMES, ScenarioConfig, Sizing

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

RUNS_HEADER = ["scenario_id", "scheduler", "hierarchy", "sizing", "J", "T", "R", "f_hw",
               "rep", "seed", "rejected", "jobs_succeeded", "S_J", "C_J",
               "events_aisle", "events_rack", "events_chassis", "events_blade",
               "events_service"]
SUMMARY_HEADER = ["scenario_id", "scheduler", "hierarchy", "sizing", "J", "T", "R", "f_hw",
                  "reps_total", "reps_rejected", "S_J_mean", "S_J_ci95", "C_J_mean",
                  "C_J_ci95"]

LIST_KEYS = ("scheduler", "hierarchy", "sizing", "jobs", "tasks", "redundancy",
             "failure_fraction")
SCALAR_KEYS = ("duration", "ticks", "seed", "repetitions")
KNOWN_KEYS = LIST_KEYS + SCALAR_KEYS


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", key=key) from None


def _int_list(text, key):
    values = []
    for item in _split(text, key):
        if ".." in item:
            lo, _, hi = item.partition("..")
            lo, hi = _int(lo.strip(), key), _int(hi.strip(), key)
            if hi < lo:
                raise ConfigError(f"empty range {item!r}", key=key)
            values.extend(range(lo, hi + 1))
        else:
            values.append(_int(item, key))
    return values


def _float(text, key):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key=key) from None


def _split(text, key):
    items = [s.strip() for s in str(text).split(",")]
    if not all(items):
        raise ConfigError(f"empty list element in {text!r}", key=key)
    return items


def _choice_list(text, key, accepted):
    items = [s.lower() for s in _split(text, key)]
    for item in items:
        if item not in accepted:
            raise ConfigError(f"unknown value {item!r}", key=key, accepted=", ".join(accepted))
    return items


PARSERS = {
    "scheduler": lambda v: _choice_list(v, "scheduler", SCHEDULER_NAMES),
    "sizing": lambda v: _choice_list(v, "sizing", [s.value for s in Sizing]),
    "hierarchy": lambda v: [parse_hierarchy(h) for h in _split(v, "hierarchy")],
    "jobs": lambda v: _int_list(v, "jobs"),
    "tasks": lambda v: _int_list(v, "tasks"),
    "redundancy": lambda v: _int_list(v, "redundancy"),
    "failure_fraction": lambda v: [_float(x, "failure_fraction") for x in _split(v, "failure_fraction")],
    "duration": lambda v: _float(v, "duration"),
    "ticks": lambda v: _int(v, "ticks"),
    "seed": lambda v: _int(v, "seed"),
    "repetitions": lambda v: _int(v, "repetitions"),
}


@dataclass
class SweepSpec:
    """Cartesian product of scenario parameters plus shared run settings."""

    scheduler: list = field(default_factory=lambda: ["cluster"])
    hierarchy: list = field(default_factory=lambda: [HierarchySpec(8, 4, 16, 16)])
    sizing: list = field(default_factory=lambda: ["fixed"])
    jobs: list = field(default_factory=lambda: [10])
    tasks: list = field(default_factory=lambda: [10])
    redundancy: list = field(default_factory=lambda: [1])
    failure_fraction: list = field(default_factory=lambda: [0.05])
    duration: float = 1.0
    ticks: int = 100
    seed: int = 0
    repetitions: int = 30

    def scenarios(self) -> list[ScenarioConfig]:
        """Every combination, validated; order is scheduler-major, then as declared."""
        combos = itertools.product(self.scheduler, self.hierarchy, self.sizing, self.jobs,
                                   self.tasks, self.redundancy, self.failure_fraction)
        return [ScenarioConfig(jobs=J, tasks=T, redundancy=R, f_hw=f, hierarchy=h,
                               sizing=sz, scheduler=sc, duration=self.duration,
                               ticks=self.ticks, base_seed=self.seed,
                               repetitions=self.repetitions)
                for sc, h, sz, J, T, R, f in combos]

    def swept_axes(self) -> list[str]:
        return [k for k in ("redundancy", "failure_fraction", "tasks", "jobs")
                if len(getattr(self, k)) > 1]

    def to_text(self) -> str:
        """Render in the config-file format (what ``parse_config`` reads back)."""
        lines = ["# effective configuration"]
        for key in LIST_KEYS:
            values = getattr(self, key)
            lines.append(f"{key} = " + ", ".join(_fmt_value(v) for v in values))
        for key in SCALAR_KEYS:
            lines.append(f"{key} = {_fmt_value(getattr(self, key))}")
        return "\n".join(lines) + "\n"


def _fmt_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_config_text(text: str, source="<config>") -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key=key, accepted=", ".join(KNOWN_KEYS))
        raw[key] = value.strip()
    return raw


def parse_config(path=None, overrides: dict | None = None) -> SweepSpec:
    """Build a validated sweep from an optional config file and flag overrides.

    ``overrides`` maps config keys to raw string values; they win over the
    file.  Every scenario in the product is validated before returning.
    """
    raw = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw.update(read_config_text(fh.read(), source=str(path)))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        key = key.replace("-", "_")
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key=key, accepted=", ".join(KNOWN_KEYS))
        raw[key] = str(value)
    spec = SweepSpec(**{k: PARSERS[k](v) for k, v in raw.items()})
    if not spec.scenarios():
        raise ConfigError("sweep is empty")
    return spec


# -- output ----------------------------------------------------------------

def _num(x):
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.6g}"


def _scenario_cols(cfg):
    return [scenario_id(cfg), cfg.scheduler, str(cfg.hierarchy), cfg.sizing.value,
            cfg.jobs, cfg.tasks, cfg.redundancy, _num(cfg.f_hw)]


def run_rows(results):
    for agg, runs in results:
        cfg = agg.config
        for rep, run in enumerate(runs):
            ev = run.failure_event_counts
            yield _scenario_cols(cfg) + [
                rep, str(run.seed), int(run.rejected), run.jobs_succeeded,
                _num(run.S_J), _num(run.C_J),
                ev[Level.AISLE], ev[Level.RACK], ev[Level.CHASSIS], ev[Level.BLADE],
                ev[Level.SERVICE]]


def summary_rows(results):
    for agg, _ in results:
        s_mean, s_ci = agg.S_J if agg.S_J else (None, None)
        c_mean, c_ci = agg.C_J if agg.C_J else (None, None)
        yield _scenario_cols(agg.config) + [agg.reps_total, agg.reps_rejected,
                                            _num(s_mean), _num(s_ci), _num(c_mean), _num(c_ci)]


AXIS_COLUMN = {"redundancy": "R", "failure_fraction": "f_hw", "tasks": "T", "jobs": "J"}


def plot_tables(results, axes):
    """One table per (metric, swept axis); columns: series keys, x, mean, ci95.

    Along the redundancy axis a normalised C_J table is added, each series
    divided by its value at the largest R.
    """
    axes = axes or ["redundancy"]
    tables = {}
    for axis in axes:
        xcol = AXIS_COLUMN[axis]
        keys = [c for c in ("scheduler", "hierarchy", "sizing", "J", "T", "R", "f_hw") if c != xcol]
        series = {}
        for agg, _ in results:
            cols = dict(zip(SUMMARY_HEADER[:8], _scenario_cols(agg.config)))
            key = tuple(cols[k] for k in keys)
            x = {"R": agg.config.redundancy, "f_hw": agg.config.f_hw,
                 "T": agg.config.tasks, "J": agg.config.jobs}[xcol]
            series.setdefault(key, []).append((x, agg))
        header = keys + [xcol, "mean", "ci95"]
        for metric in ("S_J", "C_J"):
            rows = []
            for key, points in series.items():
                for x, agg in sorted(points, key=lambda p: p[0]):
                    val = getattr(agg, metric)
                    rows.append(list(key) + [_num(x)] + ([_num(val[0]), _num(val[1])] if val else ["", ""]))
            tables[f"plot_{metric}_vs_{xcol}.csv"] = (header, rows)
        if xcol == "R":
            rows = []
            for key, points in series.items():
                points = sorted(points, key=lambda p: p[0])
                costs = {x: (agg.C_J[0] if agg.C_J else None) for x, agg in points}
                try:
                    norm = normalize_costs(costs) if all(v is not None for v in costs.values()) else None
                except ValueError:
                    norm = None
                for x, agg in points:
                    if norm is None:
                        rows.append(list(key) + [_num(x), "", ""])
                    else:
                        ref = costs[max(costs)]
                        rows.append(list(key) + [_num(x), _num(norm[x]), _num(agg.C_J[1] / ref)])
            tables["plot_C_J_norm_vs_R.csv"] = (header, rows)
    return tables


def _write_csv(path, header, rows):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def prepare_output_dir(out_dir):
    """Create ``out_dir`` and check it is writable before any run starts."""
    os.makedirs(out_dir, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=out_dir):
        pass


def emit_results(results, out_dir, spec: SweepSpec | None = None) -> list[str]:
    """Write runs.csv, plot tables, effective-config.conf and finally summary.csv."""
    if not results:
        raise ConfigError("no scenarios to write")
    prepare_output_dir(out_dir)
    written = []

    def target(name):
        path = os.path.join(out_dir, name)
        written.append(path)
        return path

    if spec is not None:
        with open(target("effective-config.conf"), "w", encoding="utf-8") as fh:
            fh.write(spec.to_text())
    _write_csv(target("runs.csv"), RUNS_HEADER, run_rows(results))
    axes = spec.swept_axes() if spec is not None else None
    for name, (header, rows) in plot_tables(results, axes).items():
        _write_csv(target(name), header, rows)
    _write_csv(target("summary.csv"), SUMMARY_HEADER, summary_rows(results))
    return written


# -- entry point -----------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="dcresilience",
        description="Simulate job scheduling under hardware failure in a tree data centre.")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--seed", help="base seed (unsigned 64-bit)")
    p.add_argument("--reps", dest="repetitions", help="repetitions per scenario")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: host CPU count)")
    p.add_argument("--scheduler", help="random, pack, cluster (comma list)")
    p.add_argument("--hierarchy", help="e.g. 8-4-16-16, h-5 (comma list)")
    p.add_argument("--sizing", help="variable or fixed (comma list)")
    p.add_argument("--jobs", help="J (list or a..b range)")
    p.add_argument("--tasks", help="T (list or a..b range)")
    p.add_argument("--redundancy", help="R (list or a..b range)")
    p.add_argument("--failure-fraction", dest="failure_fraction", help="f_hw (comma list)")
    p.add_argument("--ticks", help="communication samples per run")
    p.add_argument("--duration", help="simulated run length")
    p.add_argument("--list-scenarios", action="store_true",
                   help="print the sweep product and exit")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in
                 ("seed", "repetitions", "scheduler", "hierarchy", "sizing", "jobs", "tasks",
                  "redundancy", "failure_fraction", "ticks", "duration")}
    try:
        spec = parse_config(args.config, overrides)
        scenarios = spec.scenarios()
        if args.threads is not None and args.threads < 1:
            raise ConfigError("must be >= 1", key="threads")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    if args.list_scenarios:
        for cfg in scenarios:
            print(scenario_id(cfg))
        return EXIT_OK

    try:
        prepare_output_dir(args.out)
    except OSError as exc:
        print(f"cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        results = run_sweep(scenarios, workers=args.threads)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        emit_results(results, args.out, spec)
    except OSError as exc:
        print(f"cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    for agg, _ in results:
        s = f"{agg.S_J[0]:.3f}" if agg.S_J else "n/a"
        print(f"{agg.scenario_id}: S_J={s} rejected={agg.reps_rejected}/{agg.reps_total}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
