# %% [markdown]
# # Timing sweeps and power-law fits
#
# Every method runs on the same random instances.  Runtimes are fitted to
# r = c * n^q by least squares on log-log scale.  Sizes here are small so the
# script finishes quickly; the CLI `bench` command runs the full sweep.

# %%
import os
import tempfile

from transport_simplex import fit_power_law, run_benchmark, write_csv
from transport_simplex.bench import mean_runtime

methods = ["shortlist", "modrowmin", "altrowcol", "leastcost"]
records = run_benchmark(sizes=[100, 200, 400], reps=3, methods=methods, base_seed=1)
csv_path = os.path.join(tempfile.gettempdir(), "bench_demo.csv")
write_csv(records, csv_path)
print("wrote", csv_path)

# %%
for m in methods:
    fit = fit_power_law(records, m)
    means = ", ".join(f"{mean_runtime(records, m, n=n):7.1f}" for n in (100, 200, 400))
    print(f"{m:>10}: mean ms [{means}]  c={fit.c:.3g}  q={fit.q:.3f}")

# %%
# all methods solved the same instances, so their objectives must agree
by_instance = {}
for r in records:
    by_instance.setdefault((r.n, r.rep), []).append(r.objective)
print("max relative objective spread:",
      max((max(v) - min(v)) / min(v) for v in by_instance.values()))
