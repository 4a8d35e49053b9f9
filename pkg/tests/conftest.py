import numpy as np
import pytest
from hypothesis import strategies as st

from transport_simplex import Problem


def integer_problem(rng, m, n, mass=(1, 20), cost=(0, 99)):
    """Balanced integer instance; masses redrawn until the totals agree."""
    lo, hi = mass
    while True:
        a = rng.integers(lo, hi + 1, m)
        b = rng.integers(lo, hi + 1, n)
        if a.sum() == b.sum():
            break
    c = rng.integers(cost[0], cost[1] + 1, (m, n))
    return Problem(a, b, c)


def is_spanning_tree(plan):
    """m+n-1 entries, every entry joins two components."""
    m, n = plan.m, plan.n
    if len(plan) != m + n - 1:
        return False
    parent = list(range(m + n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in plan.entries:
        ri, rj = find(i), find(m + j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


@st.composite
def problems(draw, max_m=6, max_n=6, max_mass=30, max_cost=50):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    a = draw(st.lists(st.integers(1, max_mass), min_size=m, max_size=m))
    b = draw(st.lists(st.integers(1, max_mass), min_size=n, max_size=n))
    d = sum(a) - sum(b)
    if d > 0:
        b[-1] += d
    else:
        a[-1] -= d
    c = draw(st.lists(st.integers(-max_cost, max_cost), min_size=m * n, max_size=m * n))
    return Problem(a, b, np.array(c, dtype=float).reshape(m, n))


@pytest.fixture
def two_by_two():
    return Problem([3, 2], [2, 3], [[1, 2], [4, 3]])
