"""Revised simplex iterations on a transportation basis.

The basis is a spanning tree of the bipartite origin/destination graph held
in a :class:`~transport_simplex.problem.TransportPlan`.  Each iteration

1. prices non-basic cells ``r_ij = c_ij - u_i - v_j`` under a pivot strategy,
   with dual prices ``u_i + v_j = c_ij`` on the basis and ``u_0 = 0``,
2. finds the alternating cycle through the entering cell, and
3. shifts ``theta`` around the cycle; the first cell of the cycle that drops
   to zero leaves the basis.

The public step functions (:func:`compute_duals`, :func:`find_cycle`,
:func:`apply_pivot`) work from scratch: breadth-first duals and a depth-first
cycle search over the per-row / per-column entry lists.  The solve loop keeps
the basis as a tree rooted at origin 0 instead; the cycle is the tree path
between the entering cell's row and column, and after a pivot only the
detached subtree is re-hung and re-priced.  Every price is still summed along
its unique root path, so the duals match a fresh breadth-first pass exactly.
"""

from __future__ import annotations

import enum
from collections import namedtuple
from dataclasses import dataclass

import numba
import numpy as np

from .exceptions import SolverAbort, StructuralError
from .problem import NIL, Problem, TransportPlan, place_entry, unlink_entry

EPS_RTOL = 1e-9


class PivotStrategy(str, enum.Enum):
    MATRIX_MOST_NEGATIVE = "matrix"
    FIRST_NEGATIVE = "first"
    MODIFIED_ROW_MOST_NEGATIVE = "modrow"


PIVOT_STRATEGIES = tuple(p.value for p in PivotStrategy)
_STRATEGY_CODE = {
    PivotStrategy.MATRIX_MOST_NEGATIVE: 0,
    PivotStrategy.FIRST_NEGATIVE: 1,
    PivotStrategy.MODIFIED_ROW_MOST_NEGATIVE: 2,
}

DualPrices = namedtuple("DualPrices", ["u", "v"])
PivotChoice = namedtuple("PivotChoice", ["cell", "cursor", "scanned"])


@dataclass
class Cycle:
    """Alternating cycle through an entering cell.

    ``cells[0]`` is the entering cell; even positions gain ``theta``, odd
    positions lose it.  ``slots`` holds the plan handles of ``cells[1:]``.
    """

    cells: list
    slots: list
    theta: float

    @property
    def signs(self):
        return ["+" if k % 2 == 0 else "-" for k in range(len(self.cells))]


@dataclass
class SolveStats:
    pivots: int = 0
    cells_scanned: int = 0
    degenerate_pivots: int = 0


def pricing_tolerance(problem: Problem) -> float:
    return EPS_RTOL * max(1.0, problem.max_abs_cost)


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _duals(cost, b, u, v):
    """Breadth-first triangular solve over the basis tree; returns nodes reached."""
    m, n = cost.shape
    seen = np.zeros(m + n, np.bool_)
    queue = np.empty(m + n, np.int64)
    u[0] = 0.0
    seen[0] = True
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        node = queue[head]
        head += 1
        if node < m:
            i = node
            s = b.row_head[i]
            while s != NIL:
                j = b.col[s]
                if not seen[m + j]:
                    seen[m + j] = True
                    v[j] = cost[i, j] - u[i]
                    queue[tail] = m + j
                    tail += 1
                s = b.row_next[s]
        else:
            j = node - m
            s = b.col_head[j]
            while s != NIL:
                i = b.row[s]
                if not seen[i]:
                    seen[i] = True
                    u[i] = cost[i, j] - v[j]
                    queue[tail] = i
                    tail += 1
                s = b.col_next[s]
    return tail


@numba.njit(cache=True)
def _select_matrix(cost, b, u, v, eps):
    m, n = cost.shape
    best = -eps
    bi = -1
    bj = -1
    scanned = 0
    for i in range(m):
        ui = u[i]
        for j in range(n):
            if b.in_basis[i, j]:
                continue
            scanned += 1
            r = cost[i, j] - ui - v[j]
            if r < best:
                best, bi, bj = r, i, j
    return bi, bj, scanned


@numba.njit(cache=True)
def _select_first(cost, b, u, v, eps):
    m, n = cost.shape
    scanned = 0
    for i in range(m):
        ui = u[i]
        for j in range(n):
            if b.in_basis[i, j]:
                continue
            scanned += 1
            if cost[i, j] - ui - v[j] < -eps:
                return i, j, scanned
    return -1, -1, scanned


@numba.njit(cache=True)
def _select_modrow(cost, b, u, v, eps, cursor):
    m, n = cost.shape
    scanned = 0
    for step in range(m):
        i = (cursor + step) % m
        ui = u[i]
        best = -eps
        bj = -1
        for j in range(n):
            if b.in_basis[i, j]:
                continue
            scanned += 1
            r = cost[i, j] - ui - v[j]
            if r < best:
                best, bj = r, j
        if bj >= 0:
            return i, bj, scanned, (i + 1) % m
    return -1, -1, scanned, cursor


@numba.njit(cache=True)
def _cycle(b, i0, j0, path, it):
    """Depth-first search for the cycle closed by entering cell (i0, j0).

    ``path[1..L]`` receives the basis slots of the cycle, starting with a
    cell in row ``i0``.  Returns ``L`` (0 if no cycle exists).
    """
    path[0] = NIL
    it[0] = b.row_head[i0]
    depth = 0
    while depth >= 0:
        s = it[depth]
        if s == NIL:
            depth -= 1
            continue
        if depth % 2 == 0:
            it[depth] = b.row_next[s]
        else:
            it[depth] = b.col_next[s]
        if s == path[depth]:
            continue
        path[depth + 1] = s
        if depth % 2 == 0:
            if b.col[s] == j0:
                return depth + 1
            it[depth + 1] = b.col_head[b.col[s]]
        else:
            it[depth + 1] = b.row_head[b.row[s]]
        depth += 1
    return 0


@numba.njit(cache=True)
def _pivot(b, i0, j0, path, length):
    """Shift theta around the cycle and swap the leaving slot for (i0, j0)."""
    theta = np.inf
    leave = -1
    for k in range(1, length + 1, 2):
        x = b.flow[path[k]]
        if x < theta:
            theta = x
            leave = path[k]
    for k in range(1, length + 1):
        s = path[k]
        if k % 2 == 1:
            b.flow[s] -= theta
        else:
            b.flow[s] += theta
    li = b.row[leave]
    lj = b.col[leave]
    unlink_entry(b, leave)
    place_entry(b, leave, i0, j0, theta)
    return li, lj, theta


# Rooted basis tree used inside the pivot loops.  Nodes 0..m-1 are origins,
# m..m+n-1 destinations; ``pot`` holds u followed by v.  After a pivot only the
# subtree cut off by the leaving cell is re-hung and re-priced, and every
# price is still computed along its unique path from origin 0, so the values
# equal a fresh breadth-first solve bit for bit.
BasisTree = namedtuple(
    "BasisTree", ["parent", "pslot", "depth", "pot", "path", "left", "right", "queue"]
)


@numba.njit(cache=True)
def _new_tree(m, n):
    k = m + n + 1
    return BasisTree(
        np.full(m + n, -1, np.int64),
        np.full(m + n, -1, np.int64),
        np.zeros(m + n, np.int64),
        np.zeros(m + n, np.float64),
        np.empty(k, np.int64),
        np.empty(k, np.int64),
        np.empty(k, np.int64),
        np.empty(k, np.int64),
    )


@numba.njit(cache=True)
def _hang(cost, b, m, t, root, head):
    """Breadth-first (re)pricing below ``root`` whose parent data is already set."""
    q = t.queue
    q[0] = root
    lo = 0
    hi = 1
    while lo < hi:
        node = q[lo]
        lo += 1
        up = t.pslot[node]
        d = t.depth[node] + 1
        if node < m:
            s = b.row_head[node]
            while s != NIL:
                if s != up:
                    nb = m + b.col[s]
                    t.parent[nb] = node
                    t.pslot[nb] = s
                    t.depth[nb] = d
                    t.pot[nb] = cost[node, b.col[s]] - t.pot[node]
                    q[hi] = nb
                    hi += 1
                s = b.row_next[s]
        else:
            s = b.col_head[node - m]
            while s != NIL:
                if s != up:
                    nb = b.row[s]
                    t.parent[nb] = node
                    t.pslot[nb] = s
                    t.depth[nb] = d
                    t.pot[nb] = cost[nb, node - m] - t.pot[node]
                    q[hi] = nb
                    hi += 1
                s = b.col_next[s]
    return hi


@numba.njit(cache=True)
def _tree_init(cost, b, t):
    m = cost.shape[0]
    t.parent[0] = -1
    t.pslot[0] = -1
    t.depth[0] = 0
    t.pot[0] = 0.0
    return _hang(cost, b, m, t, 0, 0)


@numba.njit(cache=True)
def _tree_cycle(m, t, i0, j0):
    """Tree path from origin i0 to destination j0 into ``t.path[1..L]``.

    Same cycle as the depth-first search: starts in row i0, ends in column j0.
    Returns ``(L, number of cells on the i0 side)``.
    """
    a = i0
    c = m + j0
    nl = 0
    nr = 0
    while a != c:
        if t.depth[a] >= t.depth[c]:
            t.left[nl] = t.pslot[a]
            nl += 1
            a = t.parent[a]
        else:
            t.right[nr] = t.pslot[c]
            nr += 1
            c = t.parent[c]
    for k in range(nl):
        t.path[k + 1] = t.left[k]
    for k in range(nr):
        t.path[nl + 1 + k] = t.right[nr - 1 - k]
    return nl + nr, nl


@numba.njit(cache=True)
def _tree_pivot(cost, b, t, i0, j0):
    """One pivot on entering cell (i0, j0); returns theta."""
    m = cost.shape[0]
    length, nl = _tree_cycle(m, t, i0, j0)
    path = t.path
    theta = np.inf
    pos = -1
    for k in range(1, length + 1, 2):
        x = b.flow[path[k]]
        if x < theta:
            theta = x
            pos = k
    leave = path[pos]
    for k in range(1, length + 1):
        s = path[k]
        if k % 2 == 1:
            b.flow[s] -= theta
        else:
            b.flow[s] += theta
    unlink_entry(b, leave)
    place_entry(b, leave, i0, j0, theta)
    if pos <= nl:
        x, y = i0, m + j0
    else:
        x, y = m + j0, i0
    t.parent[x] = y
    t.pslot[x] = leave
    t.depth[x] = t.depth[y] + 1
    t.pot[x] = cost[i0, j0] - t.pot[y]
    _hang(cost, b, m, t, x, 0)
    return theta


@numba.njit(cache=True)
def _optimize(cost, b, strategy, eps, cursor, max_iter, stats):
    """Pivot until no candidate is left.

    ``stats``: [pivots, cells scanned, degenerate pivots, final cursor].
    Returns 0 when optimal, 1 on the iteration cap, 2 for a broken basis.
    """
    m, n = cost.shape
    t = _new_tree(m, n)
    if _tree_init(cost, b, t) != m + n:
        return 2
    u = t.pot[:m]
    v = t.pot[m:]
    while True:
        if strategy == 0:
            i, j, sc = _select_matrix(cost, b, u, v, eps)
        elif strategy == 1:
            i, j, sc = _select_first(cost, b, u, v, eps)
        else:
            i, j, sc, cursor = _select_modrow(cost, b, u, v, eps, cursor)
        stats[1] += sc
        stats[3] = cursor
        if i < 0:
            return 0
        if stats[0] >= max_iter:
            return 1
        theta = _tree_pivot(cost, b, t, i, j)
        stats[0] += 1
        if theta == 0.0:
            stats[2] += 1


# ---------------------------------------------------------------------------
# public API


def compute_duals(problem: Problem, basis: TransportPlan) -> DualPrices:
    """Dual prices of a spanning-tree basis with ``u[0] = 0``."""
    m, n = problem.m, problem.n
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    reached = _duals(problem.cost, basis.arrays, u, v)
    if reached != m + n:
        raise StructuralError(f"basis does not span: {reached} of {m + n} nodes priced")
    return DualPrices(u, v)


def relative_cost(problem: Problem, duals: DualPrices, i: int, j: int) -> float:
    return float(problem.cost[i, j] - duals.u[i] - duals.v[j])


def select_pivot(problem, basis, duals, strategy="modrow", cursor: int = 0) -> PivotChoice:
    """Choose an entering cell with ``r_ij < -eps``; ``cell`` is None at optimality.

    ``cursor`` is the row where the modified-row scan starts; the returned
    cursor is the row after the one that supplied the candidate.
    """
    strategy = PivotStrategy(strategy)
    eps = pricing_tolerance(problem)
    u, v = np.asarray(duals.u, float), np.asarray(duals.v, float)
    if strategy is PivotStrategy.MATRIX_MOST_NEGATIVE:
        i, j, sc = _select_matrix(problem.cost, basis.arrays, u, v, eps)
    elif strategy is PivotStrategy.FIRST_NEGATIVE:
        i, j, sc = _select_first(problem.cost, basis.arrays, u, v, eps)
    else:
        i, j, sc, cursor = _select_modrow(problem.cost, basis.arrays, u, v, eps, cursor)
    cell = (int(i), int(j)) if i >= 0 else None
    return PivotChoice(cell, int(cursor), int(sc))


def find_cycle(basis: TransportPlan, entering) -> Cycle:
    """The alternating cycle created by adding ``entering`` to the basis."""
    i0, j0 = entering
    if (i0, j0) in basis:
        raise ValueError(f"entering cell {entering} is already basic")
    size = basis.m + basis.n + 1
    path = np.empty(size, np.int64)
    it = np.empty(size, np.int64)
    length = _cycle(basis.arrays, i0, j0, path, it)
    if length == 0:
        raise StructuralError(f"no cycle through {entering}; basis is not spanning")
    a = basis.arrays
    slots = [int(s) for s in path[1:length + 1]]
    cells = [(int(i0), int(j0))] + [(int(a.row[s]), int(a.col[s])) for s in slots]
    theta = min(float(a.flow[s]) for s in slots[::2])
    return Cycle(cells, slots, theta)


def apply_pivot(plan: TransportPlan, cycle: Cycle):
    """Shift ``cycle.theta`` around the cycle in place; returns ``(plan, leaving cell)``."""
    path = np.array([NIL] + cycle.slots, dtype=np.int64)
    i0, j0 = cycle.cells[0]
    li, lj, _ = _pivot(plan.arrays, i0, j0, path, len(cycle.slots))
    return plan, (int(li), int(lj))


def default_max_iter(m: int, n: int) -> int:
    return 50 * (m + n) * 100


def solve_to_optimality(
    problem: Problem,
    initial_plan: TransportPlan,
    strategy="modrow",
    max_iter: int | None = None,
    cursor: int = 0,
    copy: bool = True,
):
    """Run simplex pivots from a basic feasible plan until no cell prices negative.

    Returns ``(plan, SolveStats)``.  The input plan is left untouched unless
    ``copy=False``.
    """
    strategy = PivotStrategy(strategy)
    if len(initial_plan) != problem.m + problem.n - 1:
        raise StructuralError(
            f"basis has {len(initial_plan)} entries, expected {problem.m + problem.n - 1}"
        )
    plan = initial_plan.copy() if copy else initial_plan
    if max_iter is None:
        max_iter = default_max_iter(problem.m, problem.n)
    stats = np.zeros(4, np.int64)
    code = _optimize(
        problem.cost, plan.arrays, _STRATEGY_CODE[strategy],
        pricing_tolerance(problem), cursor, max_iter, stats,
    )
    result = SolveStats(int(stats[0]), int(stats[1]), int(stats[2]))
    if code == 1:
        raise SolverAbort(
            f"iteration cap {max_iter} reached after {result.pivots} pivots "
            f"({result.degenerate_pivots} degenerate); suspected cycling",
            pivots=result.pivots,
        )
    if code == 2:
        raise StructuralError("basis lost its spanning-tree structure")
    return plan, result
