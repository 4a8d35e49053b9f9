"""Random Euclidean benchmark instances, timed method sweeps and power-law fits.

Instances place ``n`` origins and ``n`` destinations at distinct points of a
512 x 512 integer grid, draw integer masses from 1..255 and use Euclidean
distances as costs.  Every (size, repetition) pair gets its own seed derived
from the base seed, and every method is run on that same instance.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import time
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .exceptions import SolverAbort, StructuralError
from .initial import INIT_RULES, build_initial_plan
from .problem import Problem, objective
from .shortlist import solve_shortlist
from .simplex import PIVOT_STRATEGIES, solve_to_optimality

log = logging.getLogger(__name__)

GRID_SIZE = 512
MASS_RANGE = (1, 255)
PRNG_ID = "numpy.random.PCG64"
SHORTLIST = "shortlist"
METHODS = INIT_RULES + (SHORTLIST,)

# init rules that run closest to the shortlist method under modrow pivoting
COMPETITORS = ("altrowcol", "modcolmin", "modrowmin", "leastcost", "habr", "houthakker")

CSV_COLUMNS = ("method", "pivot", "n", "rep", "seed", "init_ms", "total_ms",
               "pivots", "cells_scanned", "objective")
TIMING_COLUMNS = ("init_ms", "total_ms")


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    seed: int

    def __post_init__(self):
        if self.n < 1 or 2 * self.n > GRID_SIZE * GRID_SIZE:
            raise ValueError(f"cannot place 2*{self.n} distinct points on the grid")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


Instance = namedtuple("Instance", ["problem", "origins", "destinations"])


def generate_instance(spec: InstanceSpec) -> Instance:
    """Random instance; ``origins``/``destinations`` are (n, 2) integer grid points."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n = spec.n
    taken = set()
    points = np.empty((2 * n, 2), np.int64)
    k = 0
    while k < 2 * n:
        # rejection sampling: redraw any point that is already occupied
        x, y = (int(t) for t in rng.integers(0, GRID_SIZE, 2))
        if (x, y) in taken:
            continue
        taken.add((x, y))
        points[k] = x, y
        k += 1
    lo, hi = MASS_RANGE
    a = rng.integers(lo, hi + 1, n).astype(np.float64)
    b = rng.integers(lo, hi + 1, n).astype(np.float64)
    d = a.sum() - b.sum()
    if d > 0:
        b[-1] += d
    else:
        a[-1] -= d
    origins, dests = points[:n], points[n:]
    diff = origins[:, None, :] - dests[None, :, :]
    cost = np.hypot(diff[..., 0], diff[..., 1])
    return Instance(Problem(a, b, cost), origins, dests)


def derive_seed(base_seed: int, n: int, rep: int) -> int:
    """``base_seed`` xor a stable 64-bit hash of ``(n, rep)``."""
    digest = hashlib.blake2b(f"{n}:{rep}".encode(), digest_size=8).digest()
    return (int(base_seed) ^ int.from_bytes(digest, "little")) % 2**64


@dataclass
class BenchRecord:
    method: str
    pivot: str
    n: int
    rep: int
    seed: int
    init_ms: float
    total_ms: float
    pivots: int
    cells_scanned: int
    objective: float

    @property
    def failed(self) -> bool:
        return math.isnan(self.objective)


def run_method(problem: Problem, method: str, pivot: str):
    """Solve once; returns ``(init_ms, total_ms, pivots, cells_scanned, objective)``.

    For ``method="shortlist"`` the pivot strategy applies to the final phase.
    """
    if method == SHORTLIST:
        plan, st = solve_shortlist(problem, pivot=pivot)
        return st.init_ms, st.total_ms, st.pivots, st.cells_scanned, objective(problem, plan)
    clock = time.perf_counter
    t0 = clock()
    plan = build_initial_plan(problem, method)
    t1 = clock()
    plan, st = solve_to_optimality(problem, plan, pivot, copy=False)
    t2 = clock()
    return (t1 - t0) * 1e3, (t2 - t0) * 1e3, st.pivots, st.cells_scanned, objective(problem, plan)


def _check_labels(methods, pivots):
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    for p in pivots:
        if p not in PIVOT_STRATEGIES:
            raise ValueError(f"unknown pivot strategy {p!r}; choose from {', '.join(PIVOT_STRATEGIES)}")


def _run_instance(n, rep, seed, methods, pivots):
    problem = generate_instance(InstanceSpec(n, seed)).problem
    out = []
    for method in methods:
        for pivot in pivots:
            try:
                vals = run_method(problem, method, pivot)
            except (SolverAbort, StructuralError) as exc:
                log.warning("%s/%s failed on n=%d rep=%d: %s", method, pivot, n, rep, exc)
                vals = (math.nan, math.nan, getattr(exc, "pivots", -1), -1, math.nan)
            out.append(BenchRecord(method, pivot, n, rep, seed, *vals))
    return out


def _warm_up(methods, pivots):
    # compile every kernel and prime caches outside the timed region
    problem = generate_instance(InstanceSpec(8, 0)).problem
    for method in methods:
        for pivot in pivots:
            run_method(problem, method, pivot)


def run_benchmark(sizes, reps, methods=METHODS, pivots=("modrow",), base_seed=0,
                  parallel=None) -> list[BenchRecord]:
    """Time every (method, pivot) on ``reps`` paired instances per size.

    Timings cover initialization and pivoting only, never instance
    generation.  Failed runs become records with NaN objective and timings.
    ``parallel`` > 1 runs instances on a process pool (noisier timings).
    """
    methods, pivots = tuple(methods), tuple(pivots)
    _check_labels(methods, pivots)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    jobs = [(n, rep, derive_seed(base_seed, n, rep)) for n in sizes for rep in range(reps)]
    records = []
    if parallel and parallel > 1:
        with ProcessPoolExecutor(parallel, initializer=_warm_up, initargs=(methods, pivots)) as pool:
            futures = [pool.submit(_run_instance, n, rep, seed, methods, pivots)
                       for n, rep, seed in jobs]
            for fut in futures:
                records.extend(fut.result())
    else:
        _warm_up(methods, pivots)
        for n, rep, seed in jobs:
            log.info("n=%d rep=%d seed=%d", n, rep, seed)
            records.extend(_run_instance(n, rep, seed, methods, pivots))
    return records


def _cell(value):
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6g}"
    return str(value)


def format_csv(records) -> str:
    buf = io.StringIO()
    buf.write(f"# prng={PRNG_ID}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_cell(v) for v in astuple(rec)])
    return buf.getvalue()


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(records))


def read_csv(path) -> list[BenchRecord]:
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    types = {f.name: f.type for f in fields(BenchRecord)}
    conv = {"str": str, "int": int, "float": float}
    out = []
    for row in reader:
        out.append(BenchRecord(**{k: conv[types[k]](row[k]) for k in CSV_COLUMNS}))
    return out


FitResult = namedtuple("FitResult", ["c", "q", "rss"])


def fit_power_law(records, method, pivot=None, column="total_ms") -> FitResult:
    """Least-squares fit of ``log r = log c + q log n`` on per-size mean runtimes."""
    by_size = {}
    for rec in records:
        if rec.method != method or (pivot is not None and rec.pivot != pivot) or rec.failed:
            continue
        by_size.setdefault(rec.n, []).append(getattr(rec, column))
    if len(by_size) < 2:
        raise ValueError(f"need at least 2 sizes for {method!r}, got {len(by_size)}")
    sizes = np.array(sorted(by_size), dtype=np.float64)
    means = np.array([np.mean(by_size[n]) for n in sorted(by_size)])
    if np.any(means <= 0):
        raise ValueError("mean runtimes must be positive")
    x, y = np.log(sizes), np.log(means)
    A = np.column_stack([np.ones_like(x), x])
    (logc, q), *_ = np.linalg.lstsq(A, y, rcond=None)
    rss = float(np.sum((A @ [logc, q] - y) ** 2))
    return FitResult(float(math.exp(logc)), float(q), rss)


def mean_runtime(records, method, pivot=None, n=None, column="total_ms") -> float:
    vals = [getattr(r, column) for r in records
            if r.method == method and (pivot is None or r.pivot == pivot)
            and (n is None or r.n == n) and not r.failed]
    return float(np.mean(vals)) if vals else math.nan
