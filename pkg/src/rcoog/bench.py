"""Benchmark and accuracy harness for generated plant suites."""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from .errors import RcoogError
from .oracle import GridSpec, grid_rcoog
from .solver import SolverConfig, compute_rcoog
from .sysgen import instance_seed, make_plant

ACCURACY_RATIO = 0.95
RECORD_COLUMNS = (
    "instance_id", "n_x", "seed", "method", "value", "wall_time", "iterations", "correct", "error",
)
TIMING_COLUMNS = ("wall_time", "tavg", "tmin", "tmax")


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    n_x: int
    seed: int
    method: str  # "hamiltonian" or "grid"
    value: float
    wall_time: float
    iterations: int
    correct: bool
    error: str = ""


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def run_instance(suite, size, index, base_seed, cfg: SolverConfig, grid: GridSpec):
    """Generate one plant, solve it both ways, and return two records."""
    seed = instance_seed(base_seed, size, index)
    iid = f"{suite}-{size:05d}-{index:04d}"
    plant = make_plant(suite, size, seed)

    try:
        (ref, _), t_grid = _timed(grid_rcoog, plant, cfg.epsilon, grid)
        grid_rec = BenchRecord(iid, size, seed, "grid", ref, t_grid, 0, True)
    except RcoogError as exc:
        ref = math.nan
        grid_rec = BenchRecord(iid, size, seed, "grid", math.nan, 0.0, 0, False, type(exc).__name__)

    try:
        res, t_ham = _timed(compute_rcoog, plant, cfg)
        ok = not math.isnan(ref) and res.value >= ACCURACY_RATIO * ref
        ham_rec = BenchRecord(iid, size, seed, "hamiltonian", res.value, t_ham, res.iterations, ok)
    except RcoogError as exc:
        ham_rec = BenchRecord(
            iid, size, seed, "hamiltonian", math.nan, 0.0, 0, False, type(exc).__name__
        )
    return [ham_rec, grid_rec]


def run_bench(suite, sizes, instances, base_seed, cfg=None, grid=None, workers=None):
    cfg = cfg or SolverConfig()
    grid = grid or GridSpec()
    if workers is None:
        workers = int(os.environ.get("OOG_NUM_THREADS", "1") or 1)
    jobs = [(suite, s, i, base_seed, cfg, grid) for s in sizes for i in range(instances)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda j: run_instance(*j), jobs))
    else:
        chunks = [run_instance(*j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.instance_id, r.method))
    return records


def summarize(records):
    """Per ``(n_x, method)``: mean/min/max time and fraction correct."""
    groups = {}
    for r in records:
        groups.setdefault((r.n_x, r.method), []).append(r)
    rows = []
    for (n_x, method), recs in sorted(groups.items()):
        times = [r.wall_time for r in recs if not r.error]
        rows.append({
            "nx": n_x,
            "method": method,
            "count": len(recs),
            "tavg": sum(times) / len(times) if times else math.nan,
            "tmin": min(times) if times else math.nan,
            "tmax": max(times) if times else math.nan,
            "accuracy": sum(r.correct for r in recs) / len(recs),
        })
    return rows


def records_to_csv(records, columns=RECORD_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in columns])
    return buf.getvalue()


def summary_to_csv(rows) -> str:
    buf = io.StringIO()
    cols = ("nx", "method", "count", "tavg", "tmin", "tmax", "accuracy")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def records_from_csv(text: str):
    types = {f.name: f.type for f in fields(BenchRecord)}
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for name, raw in row.items():
            t = types[name]
            if t == "bool":
                kw[name] = raw == "1"
            elif t == "int":
                kw[name] = int(raw)
            elif t == "float":
                kw[name] = float(raw)
            else:
                kw[name] = raw
        out.append(BenchRecord(**kw))
    return out
