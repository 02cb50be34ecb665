"""How much does a Beta prior move the posterior of a success probability,
compared with the Haldane prior 1/(theta (1 - theta))?

Run:  python3 demos/01_binomial_prior_choice.py
"""

from prior_impact import (
    BinomialSuccess,
    DataSummary,
    ModelCase,
    closed_form_bounds,
    posterior_pair,
    w1_distance,
)

# Ten trials, three successes, and a mildly informative Beta(2, 2) prior.
case = ModelCase(BinomialSuccess(alpha=2, beta=2), DataSummary(n=10, successes=3))

haldane_post, beta_post = posterior_pair(case)
print("posterior under Haldane :", haldane_post)
print("posterior under Beta(2,2):", beta_post)

res = closed_form_bounds(case)
print(f"\nbounds on W1: [{res.lower:.6f}, {res.upper:.6f}]")

# The brute-force distance sits inside the interval.
print(f"brute-force W1          : {w1_distance(haldane_post, beta_post):.6f}")

# Same success rate, more data: the gap closes roughly like 1/n.
print("\n    n   lower      upper      oracle")
for n in (10, 100, 1000, 10000):
    c = ModelCase(BinomialSuccess(2, 2), DataSummary(n=n, successes=3 * n // 10))
    r = closed_form_bounds(c)
    print(f"{n:5d}   {r.lower:.3e}  {r.upper:.3e}  {w1_distance(*posterior_pair(c)):.3e}")
