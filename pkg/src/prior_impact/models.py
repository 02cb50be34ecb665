"""Three conjugate comparisons with closed-form bounds.

* ``NormalVariance``  -- N(mu, sigma2) with known mu; Jeffreys prior 1/sigma2
  against an Inverse-Gamma(alpha, beta) prior on sigma2.
* ``BinomialSuccess`` -- Haldane prior 1/(theta (1 - theta)) against a
  Beta(alpha, beta) prior on the success probability.
* ``PoissonRate``     -- two Gamma(alpha_j, beta_j) priors (shape, rate) on
  the Poisson rate; beta_j = 0 gives the improper power priors
  (alpha = 1/2: Jeffreys, alpha = 1: uniform).

In every case the first prior's posterior is the base of the comparison.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import engine
from .distributions import BetaDist, Distribution, GammaDist, InverseGammaDist
from .engine import BoundsResult, NestedPair
from .errors import ModelError
from .numerics import DEFAULT_SETTINGS, QuadratureSettings

__all__ = [
    "DataSummary",
    "NormalVariance",
    "BinomialSuccess",
    "PoissonRate",
    "ModelCase",
    "Monotonicity",
    "posterior_pair",
    "nested_pair",
    "normal_variance_bounds",
    "binomial_bounds",
    "poisson_distance",
    "classify_monotone",
    "closed_form_bounds",
]


@dataclass(frozen=True)
class DataSummary:
    """Sufficient statistics of a sample.

    Only the fields relevant to a model need be set: ``centered_sq_sum``
    (sum of (x_i - mu)^2) for the normal model, ``successes`` for the
    binomial model and ``sum_x`` for the Poisson model.
    """

    n: int
    sum_x: float | None = None
    centered_sq_sum: float | None = None
    successes: int | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ModelError(f"sample size must be a positive integer, got {self.n!r}")
        if self.centered_sq_sum is not None and not self.centered_sq_sum >= 0:
            raise ModelError("centered sum of squares must be non-negative")
        if self.successes is not None and not 0 <= self.successes <= self.n:
            raise ModelError(f"successes must lie in [0, n], got {self.successes!r}")


def _nonneg(name, v):
    v = float(v)
    if not (math.isfinite(v) and v >= 0):
        raise ModelError(f"{name} must be a non-negative real, got {v!r}")
    return v


@dataclass(frozen=True)
class NormalVariance:
    alpha: float = 0.0
    beta: float = 0.0
    mu: float = 0.0
    tag = "normal-variance"

    def __post_init__(self):
        object.__setattr__(self, "alpha", _nonneg("alpha", self.alpha))
        object.__setattr__(self, "beta", _nonneg("beta", self.beta))


@dataclass(frozen=True)
class BinomialSuccess:
    alpha: float
    beta: float
    tag = "binomial"

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ModelError(f"binomial Beta prior needs {name} > 0, got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class PoissonRate:
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    tag = "poisson"

    def __post_init__(self):
        for name in ("alpha1", "beta1", "alpha2", "beta2"):
            object.__setattr__(self, name, _nonneg(name, getattr(self, name)))


Prior = Union[NormalVariance, BinomialSuccess, PoissonRate]


@dataclass(frozen=True)
class ModelCase:
    prior: Prior
    data: DataSummary

    def __post_init__(self):
        p, d = self.prior, self.data
        if isinstance(p, NormalVariance):
            if d.centered_sq_sum is None:
                raise ModelError("normal-variance model needs the centered sum of squares S")
            if d.n < 3:
                raise ModelError("normal-variance requires n >= 3 (the Jeffreys posterior mean needs n/2 > 1)")
            if d.centered_sq_sum <= 0:
                raise ModelError("normal-variance requires S > 0 for a proper Jeffreys posterior")
        elif isinstance(p, BinomialSuccess):
            if d.successes is None:
                raise ModelError("binomial model needs the number of successes x")
            if not 1 <= d.successes <= d.n - 1:
                raise ModelError(
                    "binomial requires 1 <= x <= n-1 (at least one success and one failure)"
                )
        elif isinstance(p, PoissonRate):
            if d.sum_x is None:
                raise ModelError("poisson model needs sum_x")
            if d.sum_x < 0:
                raise ModelError("poisson sum_x must be non-negative")
            for j, (a, b) in enumerate(((p.alpha1, p.beta1), (p.alpha2, p.beta2)), start=1):
                if not d.sum_x + a > 0:
                    raise ModelError(f"poisson requires sum_x + alpha{j} > 0")
                if not d.n + b > 0:
                    raise ModelError(f"poisson requires n + beta{j} > 0")
        else:
            raise TypeError(f"unknown prior variant {type(p).__name__}")

    @property
    def tag(self) -> str:
        return self.prior.tag


class Monotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NON_MONOTONE = "non-monotone"


def _require(case: ModelCase, kind):
    if not isinstance(case.prior, kind):
        raise TypeError(f"expected a {kind.__name__} case, got {type(case.prior).__name__}")


def posterior_pair(case: ModelCase) -> tuple[Distribution, Distribution]:
    """(posterior under prior 1, posterior under prior 2)."""
    p, d = case.prior, case.data
    if isinstance(p, NormalVariance):
        half_s = 0.5 * d.centered_sq_sum
        return (InverseGammaDist(0.5 * d.n, half_s),
                InverseGammaDist(0.5 * d.n + p.alpha, half_s + p.beta))
    if isinstance(p, BinomialSuccess):
        x, n = d.successes, d.n
        return BetaDist(x, n - x), BetaDist(p.alpha + x, p.beta + n - x)
    return (GammaDist(d.sum_x + p.alpha1, d.n + p.beta1),
            GammaDist(d.sum_x + p.alpha2, d.n + p.beta2))


# ---------------------------------------------------------------------------
# prior ratios, written in log form so that large exponents do not overflow
# ---------------------------------------------------------------------------


def _signed_exp(sign, log_mag):
    with np.errstate(over="ignore"):
        return np.where(sign == 0, 0.0, sign * np.exp(log_mag))


def _normal_ratio(alpha, beta):
    def rho(t):
        return np.exp(-alpha * np.log(t) - beta / t)

    def rho_prime(t):
        # t^(-alpha-2) exp(-beta/t) (beta - alpha t)
        lin = beta - alpha * t
        with np.errstate(divide="ignore"):
            return _signed_exp(np.sign(lin), -(alpha + 2.0) * np.log(t) - beta / t + np.log(np.abs(lin)))
    return rho, rho_prime


def _binomial_ratio(alpha, beta):
    def rho(t):
        return np.exp(alpha * np.log(t) + beta * np.log1p(-t))

    def rho_prime(t):
        # t^(alpha-1) (1-t)^(beta-1) (alpha - (alpha+beta) t)
        lin = alpha - (alpha + beta) * t
        with np.errstate(divide="ignore"):
            return _signed_exp(np.sign(lin), (alpha - 1.0) * np.log(t)
                               + (beta - 1.0) * np.log1p(-t) + np.log(np.abs(lin)))
    return rho, rho_prime


def _poisson_ratio(da, db):
    def rho(t):
        return np.exp(da * np.log(t) - db * t)

    def rho_prime(t):
        # t^(da-1) exp(-db t) (da - db t)
        lin = da - db * t
        with np.errstate(divide="ignore"):
            return _signed_exp(np.sign(lin), (da - 1.0) * np.log(t) - db * t + np.log(np.abs(lin)))
    return rho, rho_prime


_P2_LEVELS = np.array([1e-6, 0.01, 0.16, 0.5, 0.84, 0.99, 1 - 1e-6])


def nested_pair(case: ModelCase) -> NestedPair:
    """Base posterior and prior ratio of a case, for the generic engine."""
    p = case.prior
    base, other = posterior_pair(case)
    if isinstance(p, NormalVariance):
        rho, rho_prime = _normal_ratio(p.alpha, p.beta)
    elif isinstance(p, BinomialSuccess):
        rho, rho_prime = _binomial_ratio(p.alpha, p.beta)
    else:
        rho, rho_prime = _poisson_ratio(p.alpha2 - p.alpha1, p.beta2 - p.beta1)
    hints = tuple(float(v) for v in other.quantile(_P2_LEVELS))
    return NestedPair(base=base, rho=rho, rho_prime=rho_prime, breakpoints=hints)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def normal_variance_bounds(case: ModelCase) -> BoundsResult:
    """Jeffreys vs Inverse-Gamma(alpha, beta) prior for a normal variance.

    Lower bound ``|alpha S/2 - (n/2 - 1) beta| / ((n/2 + alpha - 1)(n/2 - 1))``
    is the exact gap between posterior means.  The upper bound bounds
    ``|beta - alpha t|`` by ``beta + alpha t`` and is therefore not sharp.
    Both are evaluated in rational arithmetic, so nearly cancelling terms
    still give a correctly rounded result.
    """
    _require(case, NormalVariance)
    a, b, s = (Fraction(v) for v in (case.prior.alpha, case.prior.beta, case.data.centered_sq_sum))
    h = Fraction(case.data.n, 2)
    den = (h + a - 1) * (h - 1)
    lower = float(abs(a * s / 2 - (h - 1) * b) / den)
    upper = float((a * s / 2 + h * b + (2 * a - 1) * b) / den)
    # coincident bounds pin the distance (alpha = beta = 0 gives 0, 0)
    return BoundsResult(lower=lower, upper=upper, exact=lower == upper)


def binomial_bounds(case: ModelCase) -> BoundsResult:
    """Haldane vs Beta(alpha, beta) prior for a binomial success probability."""
    _require(case, BinomialSuccess)
    a, b = Fraction(case.prior.alpha), Fraction(case.prior.beta)
    n, x = case.data.n, case.data.successes
    lower = float(abs(n * a - (a + b) * x) / (n * (n + a + b)))
    upper = float((a + (b - a) * (a + x) / (a + b + n)) / n)
    return BoundsResult(lower=lower, upper=upper, exact=lower == upper)


def classify_monotone(alpha1: float, beta1: float, alpha2: float, beta2: float) -> Monotonicity:
    """Monotonicity of ``t^(alpha2-alpha1) exp(-(beta2-beta1) t)`` on (0, inf).

    Equal parameter pairs give a constant ratio, reported as INCREASING.
    """
    if alpha1 <= alpha2 and beta1 >= beta2:
        return Monotonicity.INCREASING
    if alpha1 >= alpha2 and beta1 <= beta2:
        return Monotonicity.DECREASING
    return Monotonicity.NON_MONOTONE


def poisson_distance(case: ModelCase, settings: QuadratureSettings = DEFAULT_SETTINGS) -> BoundsResult:
    """Exact distance for monotone prior ratios, bounds otherwise.

    For monotone ratios the distance is
    ``|(alpha2 - alpha1) - (beta2 - beta1) (sum_x + alpha2)/(n + beta2)| / (n + beta1)``.
    Outside the monotone regions that value is still the lower bound (it is
    the gap between posterior means) and the upper bound comes from the
    generic engine.
    The diagnostics also carry the same bracket divided by ``n + beta2``
    (``distance_prefactor_beta2``), a variant that does not match the
    posterior means and is kept only for comparison.
    """
    _require(case, PoissonRate)
    p, d = case.prior, case.data
    mono = classify_monotone(p.alpha1, p.beta1, p.alpha2, p.beta2)
    a1, b1, a2, b2, sx = (Fraction(v) for v in (p.alpha1, p.beta1, p.alpha2, p.beta2, d.sum_x))
    bracket = (a2 - a1) - (b2 - b1) * (sx + a2) / (d.n + b2)
    diagnostics = {
        "monotonicity": mono.value,
        "distance_prefactor_beta1": float(abs(bracket) / (d.n + b1)),
        "distance_prefactor_beta2": float(abs(bracket) / (d.n + b2)),
    }
    if mono is not Monotonicity.NON_MONOTONE:
        dist = diagnostics["distance_prefactor_beta1"]
        return BoundsResult(lower=dist, upper=dist, exact=True, diagnostics=diagnostics)
    # the bracket over (n + beta1) is the signed mean gap in every region,
    # so the lower bound stays closed-form; only the upper needs quadrature
    res = engine.bounds(nested_pair(case), settings)
    diagnostics.update(res.diagnostics)
    diagnostics["engine_lower"] = res.lower
    lower = diagnostics["distance_prefactor_beta1"]
    return BoundsResult(lower=lower, upper=max(res.upper, lower), exact=False,
                        upper_supnorm=res.upper_supnorm, diagnostics=diagnostics)


def closed_form_bounds(case: ModelCase, settings: QuadratureSettings = DEFAULT_SETTINGS) -> BoundsResult:
    """Dispatch to the model's closed-form bounds."""
    if isinstance(case.prior, NormalVariance):
        return normal_variance_bounds(case)
    if isinstance(case.prior, BinomialSuccess):
        return binomial_bounds(case)
    return poisson_distance(case, settings)
