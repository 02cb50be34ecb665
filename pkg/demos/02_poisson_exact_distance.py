"""Poisson rate with two Gamma priors.

When the ratio of the two priors is monotone the lower and upper bounds
meet, and the Wasserstein distance between posteriors is available in
closed form.  Otherwise only an interval is returned.

Run:  python3 demos/02_poisson_exact_distance.py
"""

from prior_impact import (
    DataSummary,
    ModelCase,
    PoissonRate,
    classify_monotone,
    closed_form_bounds,
    posterior_pair,
    w1_distance,
)

data = DataSummary(n=4, sum_x=6)

# uniform prior (Gamma(1, 0), improper) against Gamma(0.5, 1)
priors = {
    "uniform vs Gamma(0.5, 1)": PoissonRate(1, 0, 0.5, 1),
    "Jeffreys vs Gamma(0.5, 1)": PoissonRate(0.5, 0, 0.5, 1),
    "Gamma(1, 1) vs Gamma(2, 2)": PoissonRate(1, 1, 2, 2),
}

for label, prior in priors.items():
    case = ModelCase(prior, data)
    res = closed_form_bounds(case)
    shape = classify_monotone(prior.alpha1, prior.beta1, prior.alpha2, prior.beta2).value
    oracle = w1_distance(*posterior_pair(case))
    if res.exact:
        print(f"{label:28s} {shape:13s} distance = {res.distance:.6f}  (oracle {oracle:.6f})")
    else:
        print(f"{label:28s} {shape:13s} in [{res.lower:.6f}, {res.upper:.6f}]  (oracle {oracle:.6f})")

# The exact distance divides by n + beta1.  Dividing by n + beta2 instead
# gives a different number, and the brute-force value disagrees with it.
res = closed_form_bounds(ModelCase(priors["uniform vs Gamma(0.5, 1)"], data))
print("\n1/(n+beta1) version:", res.diagnostics["distance_prefactor_beta1"])
print("1/(n+beta2) version:", res.diagnostics["distance_prefactor_beta2"])
