"""Initial basic feasible plans.

Every rule allocates the largest feasible amount ``min(residual supply,
residual demand)`` to the cell it picks, so each allocation exhausts a row or
a column and the allocated cells always form a forest.  Rules that stop short
of ``m + n - 1`` cells are completed with zero-flow cells by
:func:`repair_degeneracy`.

Ties are broken by smallest row index, then smallest column index; Vogel
prefers rows over columns at equal opportunity cost.
"""

from __future__ import annotations

import enum
from collections import namedtuple

import numba
import numpy as np

from .exceptions import StructuralError
from .problem import NIL, Problem, TransportPlan, check_problem, link_entry


class InitRule(str, enum.Enum):
    NORTHWEST = "northwest"
    LEAST_COST = "leastcost"
    HOUTHAKKER = "houthakker"
    VOGEL = "vogel"
    RUSSELL = "russell"
    MODIFIED_RUSSELL = "modrussell"
    WEIGHTED_FREQUENCY = "habr"
    ROW_MINIMUM = "rowmin"
    MODIFIED_ROW_MINIMUM = "modrowmin"
    COLUMN_MINIMUM = "colmin"
    MODIFIED_COLUMN_MINIMUM = "modcolmin"
    ALTERNATING_ROW_COLUMN = "altrowcol"
    TWO_SMALLEST_IN_ROW = "twosmallest"


INIT_RULES = tuple(r.value for r in InitRule)

PotentialEstimates = namedtuple("PotentialEstimates", ["w", "y", "mr", "mc", "reduced"])


def potential_estimates(problem: Problem, kind: str = "russell") -> PotentialEstimates:
    """Row/column estimates on the full matrix and the derived reduced matrix.

    ``kind="russell"`` gives ``d_ij = c_ij - w_i - y_j`` with row and column
    maxima; ``kind="habr"`` gives ``f_ij = c_ij - mr_i - mc_j`` with row and
    column means.
    """
    c = problem.cost
    w, y = c.max(axis=1), c.max(axis=0)
    mr, mc = c.mean(axis=1), c.mean(axis=0)
    if kind == "russell":
        reduced = c - w[:, None] - y[None, :]
    elif kind == "habr":
        reduced = c - mr[:, None] - mc[None, :]
    else:
        raise ValueError(f"unknown estimate kind {kind!r}")
    return PotentialEstimates(w, y, mr, mc, reduced)


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True)
def _alloc(b, ra, rb, i, j, left):
    # left[0]: residual rows, left[1]: residual columns
    amt = min(ra[i], rb[j])
    link_entry(b, i, j, amt)
    ra[i] -= amt
    rb[j] -= amt
    if ra[i] <= 0.0:
        ra[i] = 0.0
        left[0] -= 1
    if rb[j] <= 0.0:
        rb[j] = 0.0
        left[1] -= 1


@numba.njit(cache=True)
def _alloc_t(b, ra, rb, line, k, left, transposed):
    # ra/rb are line/cross residuals; the plan cell is (line, k) or (k, line)
    if transposed:
        amt = min(ra[line], rb[k])
        link_entry(b, k, line, amt)
        ra[line] -= amt
        rb[k] -= amt
        if ra[line] <= 0.0:
            ra[line] = 0.0
            left[1] -= 1
        if rb[k] <= 0.0:
            rb[k] = 0.0
            left[0] -= 1
    else:
        _alloc(b, ra, rb, line, k, left)


@numba.njit(cache=True)
def _start_left(ra, rb):
    left = np.zeros(2, np.int64)
    for i in range(ra.size):
        if ra[i] > 0.0:
            left[0] += 1
    for j in range(rb.size):
        if rb[j] > 0.0:
            left[1] += 1
    return left


@numba.njit(cache=True)
def _northwest(b, ra, rb):
    m, n = ra.size, rb.size
    left = _start_left(ra, rb)
    i = 0
    j = 0
    while i < m and j < n:
        _alloc(b, ra, rb, i, j, left)
        row_done = ra[i] == 0.0
        col_done = rb[j] == 0.0
        if row_done:
            i += 1
        if col_done:
            j += 1


@numba.njit(cache=True)
def _matrix_minimum(b, order, n, ra, rb):
    left = _start_left(ra, rb)
    for k in range(order.size):
        if left[0] == 0 or left[1] == 0:
            break
        f = order[k]
        i = f // n
        j = f - i * n
        if ra[i] > 0.0 and rb[j] > 0.0:
            _alloc(b, ra, rb, i, j, left)


@numba.njit(cache=True)
def _houthakker(b, c, ra, rb):
    m, n = c.shape
    left = _start_left(ra, rb)
    rowmin = np.empty(m)
    colmin = np.empty(n)
    while left[0] > 0 and left[1] > 0:
        rowmin[:] = np.inf
        colmin[:] = np.inf
        for i in range(m):
            if ra[i] <= 0.0:
                continue
            for j in range(n):
                if rb[j] > 0.0:
                    cij = c[i, j]
                    if cij < rowmin[i]:
                        rowmin[i] = cij
                    if cij < colmin[j]:
                        colmin[j] = cij
        for i in range(m):
            if ra[i] <= 0.0:
                continue
            for j in range(n):
                if ra[i] > 0.0 and rb[j] > 0.0 and c[i, j] == rowmin[i] and c[i, j] == colmin[j]:
                    _alloc(b, ra, rb, i, j, left)


@numba.njit(cache=True)
def _vogel(b, c, ra, rb):
    m, n = c.shape
    left = _start_left(ra, rb)
    while left[0] > 0 and left[1] > 0:
        best = -np.inf
        best_line = -1
        best_cell = -1
        best_is_row = True
        for i in range(m):
            if ra[i] <= 0.0:
                continue
            m1 = np.inf
            m2 = np.inf
            arg = -1
            for j in range(n):
                if rb[j] > 0.0:
                    cij = c[i, j]
                    if cij < m1:
                        m2 = m1
                        m1 = cij
                        arg = j
                    elif cij < m2:
                        m2 = cij
            pen = m1 if m2 == np.inf else m2 - m1
            if pen > best:
                best, best_line, best_cell, best_is_row = pen, i, arg, True
        for j in range(n):
            if rb[j] <= 0.0:
                continue
            m1 = np.inf
            m2 = np.inf
            arg = -1
            for i in range(m):
                if ra[i] > 0.0:
                    cij = c[i, j]
                    if cij < m1:
                        m2 = m1
                        m1 = cij
                        arg = i
                    elif cij < m2:
                        m2 = cij
            pen = m1 if m2 == np.inf else m2 - m1
            if pen > best:
                best, best_line, best_cell, best_is_row = pen, j, arg, False
        if best_is_row:
            _alloc(b, ra, rb, best_line, best_cell, left)
        else:
            _alloc(b, ra, rb, best_cell, best_line, left)


@numba.njit(cache=True)
def _russell(b, c, ra, rb):
    m, n = c.shape
    left = _start_left(ra, rb)
    w = np.empty(m)
    y = np.empty(n)
    while left[0] > 0 and left[1] > 0:
        w[:] = -np.inf
        y[:] = -np.inf
        for i in range(m):
            if ra[i] <= 0.0:
                continue
            for j in range(n):
                if rb[j] > 0.0:
                    cij = c[i, j]
                    if cij > w[i]:
                        w[i] = cij
                    if cij > y[j]:
                        y[j] = cij
        best = np.inf
        bi = -1
        bj = -1
        for i in range(m):
            if ra[i] <= 0.0:
                continue
            for j in range(n):
                if rb[j] > 0.0:
                    d = c[i, j] - w[i] - y[j]
                    if d < best:
                        best, bi, bj = d, i, j
        _alloc(b, ra, rb, bi, bj, left)


@numba.njit(cache=True)
def _line_argmin(c, line, rb):
    best = np.inf
    arg = -1
    for k in range(rb.size):
        if rb[k] > 0.0 and c[line, k] < best:
            best = c[line, k]
            arg = k
    return arg


@numba.njit(cache=True)
def _line_minimum(b, c, ra, rb, modified, transposed):
    """Row minimum rules on ``c``'s rows; pass ``c.T`` and swapped residuals for columns."""
    nl = ra.size
    left = _start_left(ra, rb) if not transposed else _start_left(rb, ra)
    if not modified:
        for line in range(nl):
            while ra[line] > 0.0 and left[0] > 0 and left[1] > 0:
                k = _line_argmin(c, line, rb)
                _alloc_t(b, ra, rb, line, k, left, transposed)
        return
    while left[0] > 0 and left[1] > 0:
        for line in range(nl):
            if ra[line] > 0.0 and left[0] > 0 and left[1] > 0:
                k = _line_argmin(c, line, rb)
                _alloc_t(b, ra, rb, line, k, left, transposed)


@numba.njit(cache=True)
def _alternating(b, c, ra, rb):
    m, n = c.shape
    left = _start_left(ra, rb)
    rc = 0
    cc = 0
    on_row = True
    while left[0] > 0 and left[1] > 0:
        if on_row:
            while ra[rc] <= 0.0:
                rc = (rc + 1) % m
            j = _line_argmin(c, rc, rb)
            _alloc(b, ra, rb, rc, j, left)
            rc = (rc + 1) % m
        else:
            while rb[cc] <= 0.0:
                cc = (cc + 1) % n
            best = np.inf
            i = -1
            for r in range(m):
                if ra[r] > 0.0 and c[r, cc] < best:
                    best = c[r, cc]
                    i = r
            _alloc(b, ra, rb, i, cc, left)
            cc = (cc + 1) % n
        on_row = not on_row


@numba.njit(cache=True)
def _two_smallest(b, c, ra, rb):
    m, n = c.shape
    left = _start_left(ra, rb)
    while left[0] > 0 and left[1] > 0:
        for i in range(m):
            if ra[i] <= 0.0 or left[1] == 0:
                continue
            m1 = np.inf
            m2 = np.inf
            j1 = -1
            j2 = -1
            for j in range(n):
                if rb[j] > 0.0:
                    cij = c[i, j]
                    if cij < m1:
                        m2, j2 = m1, j1
                        m1, j1 = cij, j
                    elif cij < m2:
                        m2, j2 = cij, j
            _alloc(b, ra, rb, i, j1, left)
            if ra[i] > 0.0 and j2 >= 0:
                _alloc(b, ra, rb, i, j2, left)


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


@numba.njit(cache=True)
def _repair(b, m, n):
    """Returns 0 on success, 1 if the existing entries contain a cycle, 2 if over-full."""
    target = m + n - 1
    k = b.count[0]
    if k > target:
        return 2
    parent = np.arange(m + n)
    for s in range(k):
        ri = _find(parent, b.row[s])
        rj = _find(parent, m + b.col[s])
        if ri == rj:
            return 1
        parent[ri] = rj
    if k == target:
        return 0
    for i in range(m):
        for j in range(n):
            if b.in_basis[i, j]:
                continue
            ri = _find(parent, i)
            rj = _find(parent, m + j)
            if ri != rj:
                parent[ri] = rj
                link_entry(b, i, j, 0.0)
                if b.count[0] == target:
                    return 0
    return 0


# ---------------------------------------------------------------------------
# public API


def repair_degeneracy(plan: TransportPlan, problem: Problem | None = None) -> TransportPlan:
    """Complete an acyclic plan to a spanning tree with zero-flow cells.

    Cells are tried in row-major order; a cell is added when it joins two
    different components.  The plan is modified in place and returned.
    """
    code = _repair(plan.arrays, plan.m, plan.n)
    if code == 1:
        raise StructuralError("plan entries contain a cycle")
    if code == 2:
        raise StructuralError(f"plan has {len(plan)} entries, more than m+n-1")
    return plan


def _stable_order(values: np.ndarray) -> np.ndarray:
    # row-major flat index is the (i, j) tie-break
    return np.argsort(values, axis=None, kind="stable")


def build_initial_plan(problem: Problem, rule: InitRule | str, repair: bool = True) -> TransportPlan:
    """Construct an initial basic feasible plan with ``rule``."""
    check_problem(problem)
    rule = InitRule(rule)
    m, n = problem.m, problem.n
    c = problem.cost
    ra = problem.supply.copy()
    rb = problem.demand.copy()
    plan = TransportPlan(m, n)
    b = plan.arrays

    if rule is InitRule.NORTHWEST:
        _northwest(b, ra, rb)
    elif rule is InitRule.LEAST_COST:
        _matrix_minimum(b, _stable_order(c), n, ra, rb)
    elif rule is InitRule.MODIFIED_RUSSELL:
        _matrix_minimum(b, _stable_order(potential_estimates(problem, "russell").reduced), n, ra, rb)
    elif rule is InitRule.WEIGHTED_FREQUENCY:
        _matrix_minimum(b, _stable_order(potential_estimates(problem, "habr").reduced), n, ra, rb)
    elif rule is InitRule.HOUTHAKKER:
        _houthakker(b, c, ra, rb)
    elif rule is InitRule.VOGEL:
        _vogel(b, c, ra, rb)
    elif rule is InitRule.RUSSELL:
        _russell(b, c, ra, rb)
    elif rule is InitRule.ROW_MINIMUM:
        _line_minimum(b, c, ra, rb, False, False)
    elif rule is InitRule.MODIFIED_ROW_MINIMUM:
        _line_minimum(b, c, ra, rb, True, False)
    elif rule is InitRule.COLUMN_MINIMUM:
        _line_minimum(b, c.T, rb, ra, False, True)
    elif rule is InitRule.MODIFIED_COLUMN_MINIMUM:
        _line_minimum(b, c.T, rb, ra, True, True)
    elif rule is InitRule.ALTERNATING_ROW_COLUMN:
        _alternating(b, c, ra, rb)
    elif rule is InitRule.TWO_SMALLEST_IN_ROW:
        _two_smallest(b, c, ra, rb)
    else:  # pragma: no cover
        raise AssertionError(rule)

    if repair:
        repair_degeneracy(plan, problem)
    return plan
