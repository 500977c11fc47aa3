"""Benchmark suites over random instances, written as CSV tables.

Instance ``index`` of size ``count`` is generated with seed
``SeedSequence([base_seed, count, index]).generate_state(1)[0]``.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import duo
from .bounds import BoundReport, lower_bound
from .errors import ConfigError
from .exact import brute_force_solve, exact_solve
from .instance import TOL, Instance, generate_random

SOLVERS = ("exact", "brute", "approx", "heuristic")
KNOWN = SOLVERS + ("bounds",)


@dataclass(frozen=True)
class BenchConfig:
    counts: tuple[int, ...]
    per_count: int
    base_seed: int = 0
    grid: float = 500.0
    solvers: tuple[str, ...] = ("approx", "heuristic", "exact", "bounds")
    time_limit_seconds: float = 600.0
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "BenchConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - {"counts", "per_count", "base_seed", "grid", "solvers", "time_limit_seconds", "workers"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("counts", "per_count", "solvers"):
            if key not in data:
                raise ConfigError(f"config is missing {key!r}")
        counts = data["counts"]
        if not isinstance(counts, list) or not counts or not all(isinstance(c, int) and c >= 6 and c % 2 == 0 for c in counts):
            raise ConfigError("counts must be a non-empty list of even integers >= 6")
        solvers = data["solvers"]
        if not isinstance(solvers, list) or not solvers:
            raise ConfigError("solvers must be a non-empty list")
        bad = [s for s in solvers if s not in KNOWN]
        if bad:
            raise ConfigError(f"unknown solvers {bad}; choose from {list(KNOWN)}")
        per_count = data["per_count"]
        if not isinstance(per_count, int) or per_count < 1:
            raise ConfigError("per_count must be a positive integer")
        try:
            return cls(
                counts=tuple(counts),
                per_count=per_count,
                base_seed=int(data.get("base_seed", 0)),
                grid=float(data.get("grid", 500.0)),
                solvers=tuple(dict.fromkeys(solvers)),
                time_limit_seconds=float(data.get("time_limit_seconds", 600.0)),
                workers=int(data.get("workers", 1)),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e)) from None

    @classmethod
    def load(cls, path) -> "BenchConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}") from None
        return cls.from_dict(data)


@dataclass
class SolverRun:
    cost: float
    runtime_seconds: float
    feasible: bool
    tour_cost: float | None = None
    optimal: bool | None = None
    best_bound: float | None = None


@dataclass
class BenchRecord:
    instance_id: str
    n_targets: int
    index: int
    seed: int
    runs: dict[str, SolverRun] = field(default_factory=dict)
    bounds: BoundReport | None = None
    bounds_runtime: float | None = None

    @property
    def lower_bound(self) -> float | None:
        return None if self.bounds is None else self.bounds.best

    @property
    def optimum(self) -> float | None:
        for name in ("exact", "brute"):
            run = self.runs.get(name)
            if run is not None and run.optimal and run.feasible:
                return run.cost
        return None

    def aposteriori_ratio(self, solver: str) -> float | None:
        opt = self.optimum
        if opt is None or solver not in self.runs:
            return None
        return self.runs[solver].cost / opt

    def ratio_to_lb(self, solver: str) -> float | None:
        if self.bounds is None or solver not in self.runs:
            return None
        return self.runs[solver].cost / self.bounds.best

    @property
    def feasible(self) -> bool:
        return all(r.feasible for r in self.runs.values())


def instance_seed(base_seed: int, count: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, count, index]).generate_state(1, dtype=np.uint64)[0])


def _checked_run(instance: Instance, solve) -> SolverRun:
    t0 = time.perf_counter()
    out = solve()
    runtime = time.perf_counter() - t0
    sol = out.solution if hasattr(out, "solution") else out
    report = duo.validate(instance, sol)
    _, _, total = duo.solution_cost(instance, sol)
    consistent = abs(total - sol.total_cost) <= TOL * max(1.0, abs(total))
    run = SolverRun(cost=total, runtime_seconds=runtime, feasible=report.feasible and consistent)
    if sol.base_tour is not None:
        run.tour_cost = sol.base_tour.cost
    if hasattr(out, "optimal"):
        run.optimal, run.best_bound = out.optimal, out.best_bound
    return run


def run_instance(config: BenchConfig, count: int, index: int) -> BenchRecord:
    seed = instance_seed(config.base_seed, count, index)
    inst = generate_random(count, seed, config.grid)
    rec = BenchRecord(inst.id, count, index, seed)
    solvers = {
        "exact": lambda: exact_solve(inst, config.time_limit_seconds),
        "brute": lambda: brute_force_solve(inst),
        "approx": lambda: duo.approx_solve(inst),
        "heuristic": lambda: duo.heuristic_solve(inst),
    }
    for name in SOLVERS:
        if name in config.solvers:
            rec.runs[name] = _checked_run(inst, solvers[name])
    if "bounds" in config.solvers:
        t0 = time.perf_counter()
        rec.bounds = lower_bound(inst)
        rec.bounds_runtime = time.perf_counter() - t0
    return rec


def _run_job(args):
    return run_instance(*args)


def run_suite(config: BenchConfig, out_dir=None) -> list[BenchRecord]:
    """Solve every configured instance; optionally write the CSV tables to ``out_dir``."""
    jobs = [(config, count, index) for count in config.counts for index in range(config.per_count)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = [run_instance(*job) for job in jobs]
    records.sort(key=lambda r: (r.n_targets, r.index))
    if out_dir is not None:
        write_tables(config, records, out_dir)
    return records


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def record_rows(config: BenchConfig, records: list[BenchRecord]):
    solvers = [s for s in SOLVERS if s in config.solvers]
    header = ["instance_id", "n_targets", "index", "seed"]
    for s in solvers:
        header += [f"{s}_cost", f"{s}_feasible"]
        if s in ("approx", "heuristic"):
            header.append(f"{s}_tour_cost")
        if s in ("exact", "brute"):
            header += [f"{s}_optimal", f"{s}_bound"]
    if "bounds" in config.solvers:
        header += ["lb_tsp", "lb_tsp_exact", "lb_matching", "lb_tsp_matching", "lb_mst_matching", "lower_bound"]
    for s in ("approx", "heuristic"):
        if s in solvers:
            header += [f"{s}_apos_ratio", f"{s}_ratio_lb"]
    rows = []
    for r in records:
        row = {"instance_id": r.instance_id, "n_targets": r.n_targets, "index": r.index, "seed": r.seed}
        for s in solvers:
            run = r.runs[s]
            row.update({f"{s}_cost": run.cost, f"{s}_feasible": run.feasible})
            row[f"{s}_tour_cost"] = run.tour_cost
            row[f"{s}_optimal"], row[f"{s}_bound"] = run.optimal, run.best_bound
            row[f"{s}_apos_ratio"], row[f"{s}_ratio_lb"] = r.aposteriori_ratio(s), r.ratio_to_lb(s)
        if r.bounds is not None:
            b = r.bounds
            row.update(
                lb_tsp=b.tsp_component,
                lb_tsp_exact=b.tsp_exact,
                lb_matching=b.matching_component,
                lb_tsp_matching=b.tsp_matching_bound,
                lb_mst_matching=b.mst_matching_bound,
                lower_bound=b.best,
            )
        rows.append([_cell(row.get(h)) for h in header])
    return header, rows


def summary_rows(config: BenchConfig, records: list[BenchRecord]):
    solvers = [s for s in SOLVERS if s in config.solvers]
    header = ["n_targets", "instances"]
    for s in solvers:
        header += [f"{s}_mean_cost", f"{s}_feasible"]
    for s in ("approx", "heuristic"):
        if s in solvers:
            header += [f"{s}_mean_apos_ratio", f"{s}_mean_ratio_lb"]
    if "bounds" in config.solvers:
        header.append("mean_lower_bound")
    rows = []
    for count in sorted(set(config.counts)):
        group = [r for r in records if r.n_targets == count]
        row = {"n_targets": count, "instances": len(group)}
        for s in solvers:
            row[f"{s}_mean_cost"] = _mean([r.runs[s].cost for r in group])
            row[f"{s}_feasible"] = sum(r.runs[s].feasible for r in group)
            row[f"{s}_mean_apos_ratio"] = _mean([r.aposteriori_ratio(s) for r in group])
            row[f"{s}_mean_ratio_lb"] = _mean([r.ratio_to_lb(s) for r in group])
        row["mean_lower_bound"] = _mean([r.lower_bound for r in group])
        rows.append([_cell(row.get(h)) for h in header])
    return header, rows


def timing_rows(config: BenchConfig, records: list[BenchRecord]):
    names = [s for s in SOLVERS if s in config.solvers] + (["bounds"] if "bounds" in config.solvers else [])
    header = ["instance_id", "n_targets", "index"] + [f"{s}_runtime" for s in names]
    rows = []
    for r in records:
        times = {s: run.runtime_seconds for s, run in r.runs.items()}
        times["bounds"] = r.bounds_runtime
        rows.append([r.instance_id, str(r.n_targets), str(r.index)] + [_cell(times.get(s)) for s in names])
    return header, rows


def timing_summary_rows(config: BenchConfig, records: list[BenchRecord]):
    header, rows = timing_rows(config, records)
    out = []
    for count in sorted(set(config.counts)):
        group = [row for row in rows if row[1] == str(count)]
        means = [_cell(_mean([float(row[k]) if row[k] else None for row in group])) for k in range(3, len(header))]
        out.append([str(count)] + means)
    return ["n_targets"] + [f"mean_{h}" for h in header[3:]], out


def _write(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_tables(config: BenchConfig, records: list[BenchRecord], out_dir) -> None:
    """records.csv and summary.csv are deterministic; timing files hold runtimes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "records.csv", *record_rows(config, records))
    _write(out / "summary.csv", *summary_rows(config, records))
    _write(out / "timings.csv", *timing_rows(config, records))
    _write(out / "timings_summary.csv", *timing_summary_rows(config, records))


def format_report(out_dir) -> str:
    """Plain-text table of summary.csv joined with mean runtimes."""
    out = Path(out_dir)
    with (out / "summary.csv").open() as fh:
        summary = list(csv.DictReader(fh))
    timings = {}
    if (out / "timings_summary.csv").exists():
        with (out / "timings_summary.csv").open() as fh:
            timings = {row["n_targets"]: row for row in csv.DictReader(fh)}
    cols = [
        ("targets", lambda r: r["n_targets"]),
        ("apos approx", lambda r: r.get("approx_mean_apos_ratio")),
        ("apos heur", lambda r: r.get("heuristic_mean_apos_ratio")),
        ("LB approx", lambda r: r.get("approx_mean_ratio_lb")),
        ("LB heur", lambda r: r.get("heuristic_mean_ratio_lb")),
        ("t approx", lambda r: timings.get(r["n_targets"], {}).get("mean_approx_runtime")),
        ("t heur", lambda r: timings.get(r["n_targets"], {}).get("mean_heuristic_runtime")),
        ("t exact", lambda r: timings.get(r["n_targets"], {}).get("mean_exact_runtime")),
    ]

    def show(v):
        if v in (None, ""):
            return "-"
        try:
            return f"{float(v):.3f}" if "." in v else v
        except ValueError:
            return v

    table = [[name for name, _ in cols]] + [[show(get(r)) for _, get in cols] for r in summary]
    widths = [max(len(row[k]) for row in table) for k in range(len(cols))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table)
