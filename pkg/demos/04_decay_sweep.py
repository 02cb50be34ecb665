"""Synthetic sweep over sample sizes: the prior's influence fades like 1/n.

Writes decay_sweep.csv to the current directory.

Run:  python3 demos/04_decay_sweep.py
"""

from prior_impact import NormalVariance, SweepPlan, fit_decay_slope, run_sweep, write_csv

# Jeffreys prior against Inverse-Gamma(2, 0.5) for a normal variance, data at sigma^2 = 1.
plan = SweepPlan(NormalVariance(alpha=2, beta=0.5), seed=7, true_param=1.0, replicates=3)
rows = run_sweep(plan, workers=2)

with open("decay_sweep.csv", "w", newline="") as fh:
    write_csv(rows, fh)

for r in rows[:: plan.replicates]:
    print(f"n={r.n:6d}  lower={r.lower:.3e}  oracle={r.oracle:.3e}  upper={r.upper:.3e}")

for column in ("lower", "oracle", "upper"):
    print(f"slope of {column:6s}: {fit_decay_slope(rows, column):+.3f}")
