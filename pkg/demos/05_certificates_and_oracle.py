# %% [markdown]
# # Checking answers independently
#
# The certificate recomputes dual prices from the returned plan without
# touching solver internals.  For tiny problems the brute-force oracle
# enumerates every spanning tree and keeps the cheapest feasible one.

# %%
import numpy as np

from transport_simplex import INIT_RULES, PIVOT_STRATEGIES, Problem, brute_force_optimum
from transport_simplex import build_initial_plan, check_certificate, objective, solve_to_optimality

rng = np.random.default_rng(4)
a = np.array([7, 5, 8])
b = np.array([6, 6, 8])
problem = Problem(a, b, rng.integers(0, 50, (3, 3)))
print(problem.cost)

# %%
best = brute_force_optimum(problem)
print("brute force optimum:", best)
for rule in INIT_RULES[:4]:
    for pivot in PIVOT_STRATEGIES:
        plan, _ = solve_to_optimality(problem, build_initial_plan(problem, rule), pivot)
        cert = check_certificate(problem, plan)
        print(f"{rule:>10}/{pivot:<6} cost {objective(problem, plan):5.0f}  "
              f"min r {cert.min_relative_cost:6.1f} at {cert.worst_cell}")
