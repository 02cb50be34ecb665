"""The generic bound engine on a pair the library has no closed form for.

Base posterior: Gamma(7, 4).  Second prior differs from the first by the
factor rho(t) = 1 + t^2 / 10 (any positive constant multiple would do).

Run:  python3 demos/03_generic_engine.py
"""

import numpy as np

from prior_impact import (
    CustomDensity,
    GammaDist,
    NestedPair,
    bounds,
    check_conditions,
    integrate,
)
from prior_impact.numerics import POSITIVE_REALS

base = GammaDist(7, 4)


def rho(t):
    return 1 + t * t / 10


def rho_prime(t):
    return t / 5


pair = NestedPair(base, rho, rho_prime)
print(check_conditions(pair))

res = bounds(pair)
print(f"lower {res.lower:.6f}  upper {res.upper:.6f}  sup-norm {res.upper_supnorm}  exact={res.exact}")

# rho' > 0 everywhere, so the bounds coincide and equal the mean gap.
# Normalise the second posterior numerically to see that.
mass = integrate(lambda t: rho(t) * base.pdf(t), POSITIVE_REALS)
mean2 = integrate(lambda t: t * rho(t) * base.pdf(t), POSITIVE_REALS) / mass
print(f"mean gap {abs(mean2 - base.mean):.6f}")

# A raw density works as a base too; its Stein kernel is then computed
# by quadrature.
raw = CustomDensity(base.pdf, POSITIVE_REALS, base.mean, base.variance, breakpoints=base.breakpoints)
print(f"custom base -> lower {bounds(NestedPair(raw, rho, rho_prime)).lower:.6f}")

# Derivative left out: central differences take over.
approx = bounds(NestedPair(base, rho))
print(f"numeric rho' -> lower {approx.lower:.6f}")

# The same pair with a sign-changing ratio derivative is no longer exact.
wiggle = NestedPair(base, lambda t: np.exp(-(t - 1.75) ** 2), lambda t: -2 * (t - 1.75) * np.exp(-(t - 1.75) ** 2))
w = bounds(wiggle)
print(f"bump ratio: [{w.lower:.6f}, {w.upper:.6f}], exact={w.exact}, roots={w.diagnostics['rho_prime_roots']}")
