"""The Shortlist Method.

Four phases:

1. per origin, a list of the ``s`` cheapest destinations, sorted by cost;
2. an initial plan allocated greedily along each origin's shortlist;
3. simplex pivots whose candidates are drawn only from batches of
   consecutive shortlists (a batch stops after ``k`` candidates or
   ``ceil(p*m)`` shortlists), pivoting on the most negative candidate;
4. ordinary simplex pivoting on the full matrix until optimal.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from .initial import repair_degeneracy
from .problem import Problem, TransportPlan, check_problem, link_entry, objective
from .simplex import (
    PivotStrategy,
    SolveStats,
    _new_tree,
    _tree_init,
    _tree_pivot,
    default_max_iter,
    pricing_tolerance,
    solve_to_optimality,
)
from .exceptions import SolverAbort, StructuralError


@dataclass(frozen=True)
class ShortlistParams:
    s: int
    k: int
    p: float

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"shortlist length s={self.s} must be >= 1")
        if self.k < 1:
            raise ValueError(f"candidate count k={self.k} must be >= 1")
        if not 0 < self.p <= 1:
            raise ValueError(f"batch fraction p={self.p} must be in (0, 1]")


def default_params(n: int) -> ShortlistParams:
    """Rule-of-thumb parameters: s=15 up to n=200, plus 15 per doubling; k=s, p=5%."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = 15 if n <= 200 else 15 + math.floor(15 * math.log2(n / 200))
    s = min(s, n)
    return ShortlistParams(s=s, k=s, p=0.05)


@dataclass
class Shortlists:
    """``dest[i]`` are origin i's ``s`` cheapest destinations, ``cost[i]`` their costs."""

    dest: np.ndarray
    cost: np.ndarray
    cursor: int = 0

    def __len__(self):
        return self.dest.shape[0]

    def pairs(self, i: int) -> list[tuple[int, float]]:
        return [(int(j), float(c)) for j, c in zip(self.dest[i], self.cost[i])]


@dataclass
class PhaseStats:
    name: str
    time_ms: float = 0.0
    pivots: int = 0
    cells_scanned: int = 0


@dataclass
class ShortlistStats:
    phases: list = field(default_factory=list)
    objectives: dict = field(default_factory=dict)

    @property
    def pivots(self):
        return sum(ph.pivots for ph in self.phases)

    @property
    def cells_scanned(self):
        return sum(ph.cells_scanned for ph in self.phases)

    @property
    def init_ms(self):
        return sum(ph.time_ms for ph in self.phases[:2])

    @property
    def total_ms(self):
        return sum(ph.time_ms for ph in self.phases)


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _sift_down(hc, hj, size, pos):
    # max-heap on (cost, j)
    while True:
        left = 2 * pos + 1
        if left >= size:
            return
        big = left
        right = left + 1
        if right < size and (hc[right] > hc[left] or (hc[right] == hc[left] and hj[right] > hj[left])):
            big = right
        if hc[big] > hc[pos] or (hc[big] == hc[pos] and hj[big] > hj[pos]):
            hc[big], hc[pos] = hc[pos], hc[big]
            hj[big], hj[pos] = hj[pos], hj[big]
            pos = big
        else:
            return


@numba.njit(cache=True)
def _build(cost, s):
    """Bounded max-heap selection of the s smallest (cost, j) per row."""
    m, n = cost.shape
    dest = np.empty((m, s), np.int64)
    vals = np.empty((m, s), np.float64)
    hc = np.empty(s, np.float64)
    hj = np.empty(s, np.int64)
    for i in range(m):
        row = cost[i]
        for q in range(s):
            hc[q] = row[q]
            hj[q] = q
        for q in range(s // 2 - 1, -1, -1):
            _sift_down(hc, hj, s, q)
        for j in range(s, n):
            # equal cost with larger j never displaces the heap top
            if row[j] < hc[0]:
                hc[0] = row[j]
                hj[0] = j
                _sift_down(hc, hj, s, 0)
        order = np.argsort(hj)
        js = hj[order]
        cs = hc[order]
        order = np.argsort(cs, kind="mergesort")
        for q in range(s):
            dest[i, q] = js[order[q]]
            vals[i, q] = cs[order[q]]
    return dest, vals


@numba.njit(cache=True)
def _initial(b, cost, dest, ra, rb, sweep):
    """Shortlist-guided greedy allocation.

    ``sweep=False`` serves each origin completely when it is visited;
    ``sweep=True`` makes one allocation per visit and sweeps the origins
    repeatedly.
    """
    m, n = cost.shape
    s = dest.shape[1]
    rows_left = 0
    cols_left = 0
    for i in range(m):
        if ra[i] > 0.0:
            rows_left += 1
    for j in range(n):
        if rb[j] > 0.0:
            cols_left += 1
    q = np.zeros(m, np.int64)
    while rows_left > 0 and cols_left > 0:
        for i in range(m):
            while ra[i] > 0.0 and cols_left > 0:
                # shortlist pointers only move forward: served demand stays served
                while q[i] < s and rb[dest[i, q[i]]] <= 0.0:
                    q[i] += 1
                if q[i] < s:
                    j = dest[i, q[i]]
                else:
                    j = -1
                    best = np.inf
                    for jj in range(n):
                        if rb[jj] > 0.0 and cost[i, jj] < best:
                            best = cost[i, jj]
                            j = jj
                amt = min(ra[i], rb[j])
                link_entry(b, i, j, amt)
                ra[i] -= amt
                rb[j] -= amt
                if ra[i] <= 0.0:
                    ra[i] = 0.0
                    rows_left -= 1
                if rb[j] <= 0.0:
                    rb[j] = 0.0
                    cols_left -= 1
                if sweep:
                    break


@numba.njit(cache=True)
def _phase3(cost, b, dest, lists_cost, k, budget, eps, cursor, max_iter, stats):
    """Shortlist-restricted pivoting.

    ``stats``: [pivots, cells scanned, final cursor].  Returns 0 when a full
    wrap over all shortlists finds no candidate, 1 on the iteration cap,
    2 for a broken basis.
    """
    m, n = cost.shape
    s = dest.shape[1]
    t = _new_tree(m, n)
    if _tree_init(cost, b, t) != m + n:
        return 2
    u = t.pot[:m]
    v = t.pot[m:]
    quiet = 0  # consecutive candidate-free shortlists
    while True:
        found = 0
        best = -eps
        bi = -1
        bj = -1
        lists = 0
        while lists < budget and found < k:
            i = cursor
            ui = u[i]
            hits = 0
            seen = 0
            for q in range(s):
                j = dest[i, q]
                if b.in_basis[i, j]:
                    continue
                seen += 1
                r = lists_cost[i, q] - ui - v[j]
                if r < -eps:
                    hits += 1
                    found += 1
                    if r < best:
                        best, bi, bj = r, i, j
                    if found >= k:
                        break
            stats[1] += seen
            cursor = (cursor + 1) % m
            lists += 1
            if hits == 0:
                quiet += 1
                if quiet >= m:
                    break
            else:
                quiet = 0
        stats[2] = cursor
        if bi < 0:
            if quiet >= m:
                return 0
            continue
        if stats[0] >= max_iter:
            return 1
        _tree_pivot(cost, b, t, bi, bj)
        stats[0] += 1


# ---------------------------------------------------------------------------
# public API


def build_shortlists(problem: Problem, s: int) -> Shortlists:
    """The ``s`` cheapest destinations of every origin, ascending by (cost, j)."""
    if not 1 <= s <= problem.n:
        raise ValueError(f"shortlist length s={s} outside [1, {problem.n}]")
    dest, vals = _build(problem.cost, s)
    return Shortlists(dest, vals)


def shortlist_initial_plan(problem: Problem, shortlists: Shortlists,
                           allocation: str = "exhaust") -> TransportPlan:
    """Greedy allocation along each origin's shortlist, falling back to the full row.

    With ``allocation="exhaust"`` an origin is served completely when visited
    (a single pass; with ``s = n`` this is the row minimum rule).  With
    ``"sweep"`` every visit makes one allocation and origins are swept until
    all supply is placed.
    """
    if allocation not in ("exhaust", "sweep"):
        raise ValueError(f"unknown allocation mode {allocation!r}")
    plan = TransportPlan(problem.m, problem.n)
    _initial(plan.arrays, problem.cost, shortlists.dest,
             problem.supply.copy(), problem.demand.copy(), allocation == "sweep")
    return repair_degeneracy(plan, problem)


def shortlist_phase3(problem, plan, shortlists, params, max_iter=None, copy=True):
    """Improve ``plan`` until no non-basic shortlist cell has negative relative cost.

    Continues from ``shortlists.cursor`` and stores the final cursor back.
    Returns ``(plan, SolveStats)``.
    """
    plan = plan.copy() if copy else plan
    budget = max(1, math.ceil(params.p * problem.m))
    if max_iter is None:
        max_iter = default_max_iter(problem.m, problem.n)
    stats = np.zeros(3, np.int64)
    code = _phase3(problem.cost, plan.arrays, shortlists.dest, shortlists.cost, params.k, budget,
                   pricing_tolerance(problem), shortlists.cursor, max_iter, stats)
    shortlists.cursor = int(stats[2])
    if code == 1:
        raise SolverAbort(f"shortlist phase hit iteration cap {max_iter}", pivots=int(stats[0]))
    if code == 2:
        raise StructuralError("basis lost its spanning-tree structure")
    return plan, SolveStats(int(stats[0]), int(stats[1]))


def solve_shortlist(problem: Problem, params: ShortlistParams | None = None,
                    pivot="modrow", record_objectives=False, allocation="exhaust"):
    """Solve ``problem`` to optimality with the Shortlist Method.

    ``pivot`` is the strategy of the final full-matrix phase and
    ``allocation`` the phase-2 mode of :func:`shortlist_initial_plan`.  With
    ``record_objectives`` the objective after phases 2, 3 and 4 is stored in
    ``stats.objectives`` (outside the timed sections).
    Returns ``(plan, ShortlistStats)``.
    """
    check_problem(problem)
    if params is None:
        params = default_params(problem.n)
    if params.s > problem.n:
        params = ShortlistParams(problem.n, params.k, params.p)
    stats = ShortlistStats()
    clock = time.perf_counter

    t0 = clock()
    lists = build_shortlists(problem, params.s)
    t1 = clock()
    stats.phases.append(PhaseStats("shortlists", (t1 - t0) * 1e3))

    t0 = clock()
    plan = shortlist_initial_plan(problem, lists, allocation)
    t1 = clock()
    stats.phases.append(PhaseStats("initial", (t1 - t0) * 1e3))
    if record_objectives:
        stats.objectives["initial"] = objective(problem, plan)

    t0 = clock()
    plan, st3 = shortlist_phase3(problem, plan, lists, params, copy=False)
    t1 = clock()
    stats.phases.append(PhaseStats("shortlist", (t1 - t0) * 1e3, st3.pivots, st3.cells_scanned))
    if record_objectives:
        stats.objectives["shortlist"] = objective(problem, plan)

    t0 = clock()
    plan, st4 = solve_to_optimality(problem, plan, PivotStrategy(pivot), copy=False)
    t1 = clock()
    stats.phases.append(PhaseStats("full", (t1 - t0) * 1e3, st4.pivots, st4.cells_scanned))
    if record_objectives:
        stats.objectives["full"] = objective(problem, plan)
    return plan, stats
