# %% [markdown]
# # Thirteen ways to start
#
# Every rule yields a basic feasible plan.  Better starts usually mean fewer
# pivots, but cheaper rules can still win on total time.

# %%
import time

from transport_simplex import INIT_RULES, InstanceSpec, build_initial_plan, generate_instance, objective
from transport_simplex import solve_to_optimality

problem = generate_instance(InstanceSpec(n=300, seed=11)).problem

# compile kernels once so the timings below measure work, not JIT
for rule in INIT_RULES:
    small = generate_instance(InstanceSpec(5, 0)).problem
    solve_to_optimality(small, build_initial_plan(small, rule))

# %%
print(f"{'rule':>12} {'start cost':>12} {'pivots':>7} {'init ms':>8} {'total ms':>9}")
for rule in INIT_RULES:
    t0 = time.perf_counter()
    start = build_initial_plan(problem, rule)
    t1 = time.perf_counter()
    best, stats = solve_to_optimality(problem, start, "modrow")
    t2 = time.perf_counter()
    print(f"{rule:>12} {objective(problem, start):12.0f} {stats.pivots:7d} "
          f"{(t1 - t0) * 1e3:8.1f} {(t2 - t0) * 1e3:9.1f}")
print("optimum:", objective(problem, best))
