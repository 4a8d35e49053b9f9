# %% [markdown]
# # A 2x2 transportation problem, one pivot at a time
#
# Two origins ship to two destinations.  We build a deliberately poor basis,
# price it with dual prices, find the improving cycle and pivot once.

# %%
import numpy as np

from transport_simplex import (
    Problem,
    TransportPlan,
    apply_pivot,
    compute_duals,
    find_cycle,
    objective,
    relative_cost,
    select_pivot,
)

problem = Problem(supply=[3, 2], demand=[2, 3], cost=[[1, 2], [4, 3]])
plan = TransportPlan.from_entries(2, 2, [(0, 1, 3), (1, 0, 2), (1, 1, 0)])
print("start:", plan.entries, "cost", objective(problem, plan))

# %%
# u_i + v_j = c_ij on every basic cell, with u_0 = 0
duals = compute_duals(problem, plan)
print("u =", duals.u, "v =", duals.v)
r = problem.cost - duals.u[:, None] - duals.v[None, :]
print("relative costs:\n", r)

# %%
choice = select_pivot(problem, plan, duals, "matrix")
print("entering cell", choice.cell, "with r =", relative_cost(problem, duals, *choice.cell))

cycle = find_cycle(plan, choice.cell)
for cell, sign in zip(cycle.cells, cycle.signs):
    print(f"  {sign} {cell}")
print("theta =", cycle.theta)

# %%
plan, leaving = apply_pivot(plan, cycle)
print("leaving cell", leaving)
print("after:", plan.entries, "cost", objective(problem, plan))
print("optimal now:", select_pivot(problem, plan, compute_duals(problem, plan)).cell is None)
