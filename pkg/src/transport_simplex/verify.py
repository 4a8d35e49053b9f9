"""Correctness instruments that share no code with the simplex engine.

``check_certificate`` recomputes dual prices from a plan with plain Python
and prices every cell with numpy; ``brute_force_optimum`` enumerates all
spanning trees of the complete bipartite graph for tiny instances.
"""

from __future__ import annotations

import math
from collections import deque, namedtuple

import numpy as np

from .exceptions import StructuralError
from .problem import Problem, plan_residual

Certificate = namedtuple("Certificate", ["min_relative_cost", "worst_cell", "feasibility_residual"])
Certificate.__doc__ = """Optimality evidence for a basic plan.

``min_relative_cost`` is the smallest ``c_ij - u_i - v_j`` over non-basic
cells (``inf`` with ``worst_cell=None`` when every cell is basic) and
``feasibility_residual`` the largest row/column sum deviation.
"""

BRUTE_FORCE_LIMIT = 10**6


def _tree_duals(problem, cells):
    m, n = problem.m, problem.n
    adj = [[] for _ in range(m + n)]
    for i, j in cells:
        adj[i].append(m + j)
        adj[m + j].append(i)
    pot = [None] * (m + n)
    pot[0] = 0.0
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in adj[a]:
            if pot[b] is None:
                i, j = (a, b - m) if a < m else (b, a - m)
                c = float(problem.cost[i, j])
                pot[b] = c - pot[a]
                queue.append(b)
    if any(p is None for p in pot):
        raise StructuralError("plan entries do not span all origins and destinations")
    return np.array(pot[:m]), np.array(pot[m:])


def check_certificate(problem: Problem, plan) -> Certificate:
    """Dual certificate of ``plan`` computed from scratch.

    ``plan`` must be basic: ``m + n - 1`` entries spanning all rows and columns.
    """
    cells = [(int(i), int(j)) for i, j, _ in plan.entries]
    if len(cells) != problem.m + problem.n - 1 or len(set(cells)) != len(cells):
        raise StructuralError(
            f"basic plan needs {problem.m + problem.n - 1} distinct entries, got {len(cells)}")
    u, v = _tree_duals(problem, cells)
    r = problem.cost - u[:, None] - v[None, :]
    ii, jj = zip(*cells)
    r[list(ii), list(jj)] = np.inf
    k = int(np.argmin(r))
    worst = float(r.flat[k])
    cell = None if math.isinf(worst) else divmod(k, problem.n)
    return Certificate(worst, cell, plan_residual(problem, plan))


def is_optimal(problem: Problem, plan, eps=None, tol=None) -> bool:
    cert = check_certificate(problem, plan)
    if eps is None:
        eps = 1e-9 * max(1.0, problem.max_abs_cost)
    if tol is None:
        tol = 1e-9 * max(problem.total_mass, 1.0)
    return cert.min_relative_cost >= -eps and cert.feasibility_residual <= tol


def spanning_tree_count(m: int, n: int) -> int:
    return m ** (n - 1) * n ** (m - 1)


def _tree_flows(problem, cells):
    """Flows on a spanning tree by repeatedly stripping leaves."""
    m, n = problem.m, problem.n
    ra = [float(x) for x in problem.supply]
    rb = [float(x) for x in problem.demand]
    incident = [set() for _ in range(m + n)]
    for k, (i, j) in enumerate(cells):
        incident[i].add(k)
        incident[m + j].add(k)
    flows = [0.0] * len(cells)
    leaves = [a for a in range(m + n) if len(incident[a]) == 1]
    while leaves:
        a = leaves.pop()
        if len(incident[a]) != 1:
            continue
        k = incident[a].pop()
        i, j = cells[k]
        x = ra[i] if a < m else rb[j]
        flows[k] = x
        ra[i] -= x
        rb[j] -= x
        other = m + j if a < m else i
        incident[other].discard(k)
        if len(incident[other]) == 1:
            leaves.append(other)
    return flows


def brute_force_optimum(problem: Problem) -> float:
    """Minimum objective over all feasible basic solutions (exhaustive)."""
    m, n = problem.m, problem.n
    if spanning_tree_count(m, n) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{m}x{n} has {spanning_tree_count(m, n)} spanning trees, "
                         f"limit {BRUTE_FORCE_LIMIT}")
    all_cells = [(i, j) for i in range(m) for j in range(n)]
    need = m + n - 1
    best = math.inf
    chosen = []

    def find(parent, x):
        while parent[x] != x:
            x = parent[x]
        return x

    def extend(start, parent):
        nonlocal best
        if len(chosen) == need:
            flows = _tree_flows(problem, chosen)
            if min(flows) >= -1e-12:
                value = sum(float(problem.cost[i, j]) * x for (i, j), x in zip(chosen, flows))
                best = min(best, value)
            return
        # not enough cells left to finish a tree
        if len(all_cells) - start < need - len(chosen):
            return
        for k in range(start, len(all_cells)):
            i, j = all_cells[k]
            ri, rj = find(parent, i), find(parent, m + j)
            if ri == rj:
                continue
            child = parent.copy()
            child[ri] = rj
            chosen.append((i, j))
            extend(k + 1, child)
            chosen.pop()

    extend(0, list(range(m + n)))
    return best
