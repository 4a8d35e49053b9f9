"""Balanced transportation problems, transport plans and the plain-text instance format.

A :class:`Problem` holds supplies ``a``, demands ``b`` and a dense ``m x n``
cost matrix.  A :class:`TransportPlan` stores the non-zero (or basic) cells
of a plan together with per-row and per-column linked lists so that the
numba kernels in :mod:`transport_simplex.simplex` can walk the basis tree
without any auxiliary graph structure.

Memory: the cost matrix takes ``8*m*n`` bytes and the basis membership mask
another ``m*n`` bytes, i.e. roughly 1.5 GB for ``m = n = 12800``.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Iterable, TextIO

import numba
import numpy as np

from .exceptions import InvalidProblemError, ParseError, StructuralError

NIL = -1

BALANCE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Problem:
    """A balanced transportation problem.

    The arrays are copied to contiguous float64 storage and made read-only,
    so a Problem can be shared freely between solvers.
    """

    supply: np.ndarray
    demand: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        for name in ("supply", "demand", "cost"):
            arr = np.array(getattr(self, name), dtype=np.float64, order="C", copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.cost.ndim != 2:
            raise InvalidProblemError([f"cost must be 2-dimensional, got {self.cost.ndim}"])

    @property
    def m(self) -> int:
        return self.cost.shape[0]

    @property
    def n(self) -> int:
        return self.cost.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.supply.sum())

    @property
    def max_abs_cost(self) -> float:
        return float(np.abs(self.cost).max()) if self.cost.size else 0.0

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return (
            np.array_equal(self.supply, other.supply)
            and np.array_equal(self.demand, other.demand)
            and np.array_equal(self.cost, other.cost)
        )

    def __repr__(self):
        return f"Problem(m={self.m}, n={self.n}, mass={_fmt(self.total_mass)})"


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips, without a trailing ``.0`` for integers."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def balance_tolerance(problem: Problem) -> float:
    return BALANCE_RTOL * max(float(problem.supply.sum()), 1.0)


def validate(problem: Problem) -> list[str]:
    """Return every violated invariant of ``problem``; an empty list means valid."""
    out = []
    m, n = problem.cost.shape
    if m < 1 or n < 1:
        out.append(f"empty problem: m={m}, n={n}")
    if problem.supply.shape != (m,):
        out.append(f"supply has shape {problem.supply.shape}, expected ({m},)")
    if problem.demand.shape != (n,):
        out.append(f"demand has shape {problem.demand.shape}, expected ({n},)")
    for name, arr in (("supply", problem.supply), ("demand", problem.demand)):
        for k, val in enumerate(arr):
            if not (math.isfinite(val) and val > 0):
                out.append(f"{name}[{k}] not > 0")
    if not np.all(np.isfinite(problem.cost)):
        bad = np.argwhere(~np.isfinite(problem.cost))[0]
        out.append(f"cost[{bad[0]},{bad[1]}] not finite")
    sa, sb = float(problem.supply.sum()), float(problem.demand.sum())
    if math.isfinite(sa) and math.isfinite(sb):
        if abs(sa - sb) > BALANCE_RTOL * max(sa, 1.0):
            out.append(f"unbalanced: {_fmt(sa)} ≠ {_fmt(sb)}")
    return out


def check_problem(problem: Problem) -> None:
    errors = validate(problem)
    if errors:
        raise InvalidProblemError(errors)


# ---------------------------------------------------------------------------
# Instance file format


def parse_problem(text: str | TextIO) -> Problem:
    """Parse an instance: ``m n``, then m supplies, n demands and m*n costs (row-major)."""
    if not isinstance(text, str):
        text = text.read()
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens.extend((tok, lineno) for tok in line.split())
    last_line = max(1, len(text.splitlines()))

    pos = 0

    def take(count, what, conv):
        nonlocal pos
        chunk = tokens[pos:pos + count]
        if len(chunk) < count:
            line = chunk[-1][1] if chunk else last_line
            raise ParseError(f"expected {count} {what}, got {len(chunk)}", line)
        pos += count
        vals = []
        for tok, lineno in chunk:
            try:
                vals.append(conv(tok))
            except ValueError:
                raise ParseError(f"non-numeric token {tok!r} in {what}", lineno) from None
        return vals

    if len(tokens) < 2:
        raise ParseError("malformed header, expected 'm n'", 1)
    m, n = take(2, "header values", int)
    if m < 1 or n < 1:
        raise ParseError(f"malformed header: m={m}, n={n}", tokens[0][1])
    supply = take(m, "supply entries", float)
    demand = take(n, "demand entries", float)
    cost = take(m * n, "cost entries", float)
    if pos != len(tokens):
        tok, lineno = tokens[pos]
        raise ParseError(f"unexpected trailing token {tok!r}", lineno)
    return Problem(supply, demand, np.array(cost).reshape(m, n))


def format_problem(problem: Problem) -> str:
    lines = [f"{problem.m} {problem.n}"]
    lines.append(" ".join(_fmt(x) for x in problem.supply))
    lines.append(" ".join(_fmt(x) for x in problem.demand))
    for row in problem.cost:
        lines.append(" ".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def read_problem(path) -> Problem:
    with open(path) as fh:
        return parse_problem(fh.read())


def write_problem(problem: Problem, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_problem(problem))


# ---------------------------------------------------------------------------
# Transport plans

# Flat storage of a basis: entry slots plus doubly linked lists per row and column.
BasisArrays = namedtuple(
    "BasisArrays",
    [
        "row",  # int64[cap]
        "col",  # int64[cap]
        "flow",  # float64[cap]
        "count",  # int64[1], number of occupied slots
        "row_head",  # int64[m]
        "row_next",  # int64[cap]
        "row_prev",  # int64[cap]
        "col_head",  # int64[n]
        "col_next",  # int64[cap]
        "col_prev",  # int64[cap]
        "in_basis",  # bool[m, n]
    ],
)


def _empty_arrays(m: int, n: int, cap: int) -> BasisArrays:
    cap = max(cap, 1)
    return BasisArrays(
        row=np.full(cap, NIL, np.int64),
        col=np.full(cap, NIL, np.int64),
        flow=np.zeros(cap, np.float64),
        count=np.zeros(1, np.int64),
        row_head=np.full(m, NIL, np.int64),
        row_next=np.full(cap, NIL, np.int64),
        row_prev=np.full(cap, NIL, np.int64),
        col_head=np.full(n, NIL, np.int64),
        col_next=np.full(cap, NIL, np.int64),
        col_prev=np.full(cap, NIL, np.int64),
        in_basis=np.zeros((m, n), np.bool_),
    )


@numba.njit(cache=True)
def link_entry(b, i, j, x):
    """Append cell (i, j) with flow x; returns its slot."""
    s = b.count[0]
    b.count[0] = s + 1
    place_entry(b, s, i, j, x)
    return s


@numba.njit(cache=True)
def place_entry(b, s, i, j, x):
    b.row[s] = i
    b.col[s] = j
    b.flow[s] = x
    h = b.row_head[i]
    b.row_prev[s] = NIL
    b.row_next[s] = h
    if h != NIL:
        b.row_prev[h] = s
    b.row_head[i] = s
    h = b.col_head[j]
    b.col_prev[s] = NIL
    b.col_next[s] = h
    if h != NIL:
        b.col_prev[h] = s
    b.col_head[j] = s
    b.in_basis[i, j] = True


@numba.njit(cache=True)
def unlink_entry(b, s):
    """Detach slot s from its row and column lists; the slot itself stays allocated."""
    i = b.row[s]
    j = b.col[s]
    p, q = b.row_prev[s], b.row_next[s]
    if p != NIL:
        b.row_next[p] = q
    else:
        b.row_head[i] = q
    if q != NIL:
        b.row_prev[q] = p
    p, q = b.col_prev[s], b.col_next[s]
    if p != NIL:
        b.col_next[p] = q
    else:
        b.col_head[j] = q
    if q != NIL:
        b.col_prev[q] = p
    b.in_basis[i, j] = False


class TransportPlan:
    """Entries ``(i, j, x_ij)`` of a transport plan with row and column indexes.

    Slots are entry handles; ``row_index(i)`` and ``col_index(j)`` list the
    handles in row ``i`` / column ``j``.  A plan used as a simplex basis holds
    exactly ``m + n - 1`` entries forming a spanning tree of the bipartite
    origin/destination graph, zero flows included.
    """

    def __init__(self, m: int, n: int, capacity: int | None = None):
        self.m = m
        self.n = n
        self.arrays = _empty_arrays(m, n, capacity or (m + n - 1))

    @classmethod
    def from_entries(cls, m: int, n: int, entries: Iterable, capacity: int | None = None):
        entries = list(entries)
        plan = cls(m, n, capacity or max(m + n - 1, len(entries)))
        for i, j, x in entries:
            plan.add(i, j, x)
        return plan

    def add(self, i: int, j: int, x: float) -> int:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"cell ({i}, {j}) outside {self.m}x{self.n}")
        if self.arrays.in_basis[i, j]:
            raise ValueError(f"cell ({i}, {j}) already in plan")
        if len(self) >= len(self.arrays.row):
            raise StructuralError("plan capacity exceeded")
        return link_entry(self.arrays, i, j, float(x))

    def __len__(self):
        return int(self.arrays.count[0])

    def __contains__(self, cell):
        i, j = cell
        return bool(self.arrays.in_basis[i, j])

    @property
    def entries(self) -> list[tuple[int, int, float]]:
        a = self.arrays
        k = len(self)
        return [(int(a.row[s]), int(a.col[s]), float(a.flow[s])) for s in range(k)]

    def cells(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.entries}

    def flow_at(self, i: int, j: int) -> float:
        a = self.arrays
        s = a.row_head[i]
        while s != NIL:
            if a.col[s] == j:
                return float(a.flow[s])
            s = a.row_next[s]
        return 0.0

    def row_index(self, i: int) -> list[int]:
        return self._walk(self.arrays.row_head[i], self.arrays.row_next)

    def col_index(self, j: int) -> list[int]:
        return self._walk(self.arrays.col_head[j], self.arrays.col_next)

    @staticmethod
    def _walk(s, nxt):
        out = []
        while s != NIL:
            out.append(int(s))
            s = nxt[s]
        return out

    def to_dense(self) -> np.ndarray:
        a = self.arrays
        k = len(self)
        x = np.zeros((self.m, self.n))
        x[a.row[:k], a.col[:k]] = a.flow[:k]
        return x

    def copy(self) -> "TransportPlan":
        new = TransportPlan.__new__(TransportPlan)
        new.m, new.n = self.m, self.n
        new.arrays = BasisArrays(*(arr.copy() for arr in self.arrays))
        return new

    def __repr__(self):
        return f"TransportPlan(m={self.m}, n={self.n}, entries={len(self)})"


def plan_residual(problem: Problem, plan) -> float:
    """Largest absolute deviation of plan row/column sums from supply/demand."""
    x = plan.to_dense() if isinstance(plan, TransportPlan) else np.asarray(plan)
    r = np.abs(x.sum(axis=1) - problem.supply).max()
    c = np.abs(x.sum(axis=0) - problem.demand).max()
    return float(max(r, c))


def objective(problem: Problem, plan) -> float:
    """Total cost ``sum c_ij x_ij`` over the plan entries."""
    entries = plan.entries if isinstance(plan, TransportPlan) else list(plan)
    if not entries:
        return 0.0
    ii = np.array([e[0] for e in entries], dtype=np.int64)
    jj = np.array([e[1] for e in entries], dtype=np.int64)
    xx = np.array([e[2] for e in entries], dtype=np.float64)
    m, n = problem.cost.shape
    if ii.min() < 0 or jj.min() < 0 or ii.max() >= m or jj.max() >= n:
        raise IndexError(f"plan entry outside the {m}x{n} cost matrix")
    return float(np.dot(problem.cost[ii, jj], xx))


# ---------------------------------------------------------------------------
# Plan files: one "i j x" line per entry, 0-based indices


def format_plan(plan: TransportPlan) -> str:
    lines = [f"{plan.m} {plan.n} {len(plan)}"]
    lines.extend(f"{i} {j} {_fmt(x)}" for i, j, x in plan.entries)
    return "\n".join(lines) + "\n"


def parse_plan(text: str) -> TransportPlan:
    rows = [(k, line.split()) for k, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not rows or len(rows[0][1]) != 3:
        raise ParseError("malformed plan header, expected 'm n count'", 1)
    try:
        m, n, count = (int(t) for t in rows[0][1])
    except ValueError:
        raise ParseError("malformed plan header, expected 'm n count'", rows[0][0]) from None
    if len(rows) - 1 != count:
        raise ParseError(f"expected {count} plan entries, got {len(rows) - 1}", rows[-1][0])
    entries = []
    for lineno, toks in rows[1:]:
        if len(toks) != 3:
            raise ParseError("expected 'i j x'", lineno)
        try:
            entries.append((int(toks[0]), int(toks[1]), float(toks[2])))
        except ValueError:
            raise ParseError(f"non-numeric token in {' '.join(toks)!r}", lineno) from None
    return TransportPlan.from_entries(m, n, entries)
