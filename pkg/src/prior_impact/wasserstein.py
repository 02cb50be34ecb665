"""Brute-force Wasserstein-1 distance between two univariate distributions.

Two independent routes, both standard on the real line::

    W1(P, Q) = int |F_P(t) - F_Q(t)| dt            (CDF form)
             = int_0^1 |F_P^-1(u) - F_Q^-1(u)| du  (quantile form)

Neither uses Stein kernels or prior ratios, so either one can serve as
ground truth for the bounds computed elsewhere in the package.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import numerics
from .distributions import Distribution
from .errors import DomainError, OracleInconsistencyError
from .numerics import DEFAULT_SETTINGS, Interval, QuadratureSettings

__all__ = [
    "OracleMethod",
    "OracleSettings",
    "OracleResult",
    "w1_distance",
    "w1_detailed",
    "w1_crosscheck",
]

QUANTILE_EPS = 1e-9
AGREEMENT_RTOL = 1e-6


class OracleMethod(enum.Enum):
    CDF_INTEGRAL = "cdf"
    QUANTILE_INTEGRAL = "quantile"


@dataclass(frozen=True)
class OracleSettings:
    method: OracleMethod = OracleMethod.CDF_INTEGRAL
    settings: QuadratureSettings = field(default_factory=lambda: DEFAULT_SETTINGS)


@dataclass(frozen=True)
class OracleResult:
    """Distance plus an error budget (quadrature error + tail allowance)."""

    distance: float
    error: float
    method: OracleMethod


def _check(p: Distribution, q: Distribution):
    for d in (p, q):
        if not d.has_mean():
            raise DomainError(f"Wasserstein-1 distance needs finite means; {d!r} has none")


def _crossings(p: Distribution, q: Distribution, lo: float, hi: float):
    """Points in (lo, hi) where F_p - F_q changes sign."""
    pts = sorted({*p.breakpoints, *q.breakpoints})
    pts = [t for t in pts if lo < t < hi]
    if len(pts) < 2:
        return []
    fine = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        if a > 0 and b / a > 4:
            fine.extend(np.geomspace(a, b, 33)[1:])
        else:
            fine.extend(np.linspace(a, b, 33)[1:])
    xs = np.unique(np.array(fine))
    diff = p.cdf(xs) - q.cdf(xs)
    ok = diff != 0
    xs, diff = xs[ok], diff[ok]
    out = []
    for i in np.nonzero(np.sign(diff[1:]) != np.sign(diff[:-1]))[0]:
        def g(t):
            return float(p.cdf(t) - q.cdf(t))
        try:
            out.append(optimize.brentq(g, xs[i], xs[i + 1], xtol=1e-15, rtol=8 * np.finfo(float).eps))
        except ValueError:
            out.append(0.5 * (xs[i] + xs[i + 1]))
    return out


def _upper_excess(d: Distribution, t0: float) -> float:
    """E[(X - t0)+]."""
    return max(d.partial_mean_above(t0) - t0 * d.sf(t0), 0.0)


def _lower_excess(d: Distribution, t0: float) -> float:
    """E[(t0 - X)+]."""
    return max(t0 * d.cdf(t0) - d.partial_mean_below(t0), 0.0)


def _cdf_integral(p: Distribution, q: Distribution, settings: QuadratureSettings) -> OracleResult:
    lo = min(p.support.lo, q.support.lo)
    hi = max(p.support.hi, q.support.hi)
    cut = settings.tail_cutoff_mass
    tail_value = 0.0
    tail_slack = 0.0
    # truncate infinite ends where both tail masses are below the cutoff; the
    # dropped piece lies between |e_p - e_q| and e_p + e_q (exact when the
    # CDFs do not cross out there), so we add the former and book the gap.
    if math.isinf(hi):
        hi = max(float(p.quantile(1.0 - cut)), float(q.quantile(1.0 - cut)))
        ep, eq = _upper_excess(p, hi), _upper_excess(q, hi)
        tail_value += abs(ep - eq)
        tail_slack += ep + eq - abs(ep - eq)
    if math.isinf(lo):
        lo = min(float(p.quantile(cut)), float(q.quantile(cut)))
        ep, eq = _lower_excess(p, lo), _lower_excess(q, lo)
        tail_value += abs(ep - eq)
        tail_slack += ep + eq - abs(ep - eq)

    # beyond the pooled median compare survival functions: no cancellation
    centre = 0.5 * (float(p.quantile(0.5)) + float(q.quantile(0.5)))

    def integrand(t):
        return np.abs(np.where(t <= centre, p.cdf(t) - q.cdf(t), q.sf(t) - p.sf(t)))

    cross = _crossings(p, q, lo, hi)
    hints = [t for t in (*p.breakpoints, *q.breakpoints, *cross, centre) if lo < t < hi]
    val, err = numerics.integrate(integrand, Interval(lo, hi), settings,
                                  breakpoints=hints, full_output=True)
    return OracleResult(float(val + tail_value), float(err + tail_slack), OracleMethod.CDF_INTEGRAL)


def _quantile_integral(p: Distribution, q: Distribution, settings: QuadratureSettings) -> OracleResult:
    eps = QUANTILE_EPS

    def integrand(u):
        return np.abs(p.quantile(u) - q.quantile(u))

    lo_end = max(p.support.lo, q.support.lo)
    hi_end = min(p.support.hi, q.support.hi)
    cross = [float(p.cdf(t)) for t in _crossings(p, q, lo_end, hi_end)]
    levels = (1e-6, 1e-3, 0.02, 0.16, 0.5, 0.84, 0.98, 0.999, 1 - 1e-6)
    hints = [u for u in (*levels, *cross) if eps < u < 1 - eps]
    val, err = numerics.integrate(integrand, Interval(eps, 1.0 - eps), settings,
                                  breakpoints=hints, full_output=True)
    # tails: int_0^eps Q_p(u) du = E[X; X < Q_p(eps)], similarly above 1 - eps;
    # exact as long as the quantile functions do not cross inside the tails
    tail_value = tail_slack = 0.0
    a_p, a_q = float(p.quantile(eps)), float(q.quantile(eps))
    b_p, b_q = float(p.quantile(1 - eps)), float(q.quantile(1 - eps))
    for mp, mq in (
        (p.partial_mean_below(a_p), q.partial_mean_below(a_q)),
        (p.partial_mean_above(b_p), q.partial_mean_above(b_q)),
    ):
        tail_value += abs(mp - mq)
        # for non-negative variables the tail piece is at most mp + mq
        tail_slack += abs(mp) + abs(mq) - abs(mp - mq)
    return OracleResult(float(val + tail_value), float(err + max(tail_slack, 0.0)),
                        OracleMethod.QUANTILE_INTEGRAL)


def w1_detailed(p: Distribution, q: Distribution, s: OracleSettings = OracleSettings()) -> OracleResult:
    _check(p, q)
    if s.method is OracleMethod.CDF_INTEGRAL:
        return _cdf_integral(p, q, s.settings)
    return _quantile_integral(p, q, s.settings)


def w1_distance(p: Distribution, q: Distribution, s: OracleSettings = OracleSettings()) -> float:
    """Wasserstein-1 distance between two distributions with finite means."""
    return w1_detailed(p, q, s).distance


def w1_crosscheck(p: Distribution, q: Distribution, s: OracleSettings = OracleSettings()) -> tuple[float, float]:
    """(CDF-form value, quantile-form value); raises if they disagree.

    Agreement means ``|a - b| <= 1e-6 * max(a, b)`` (with an absolute floor
    at the quadrature's ``abs_tol``).
    """
    a = w1_distance(p, q, OracleSettings(OracleMethod.CDF_INTEGRAL, s.settings))
    b = w1_distance(p, q, OracleSettings(OracleMethod.QUANTILE_INTEGRAL, s.settings))
    if abs(a - b) > AGREEMENT_RTOL * max(a, b) + s.settings.abs_tol:
        raise OracleInconsistencyError(
            f"CDF and quantile forms disagree for {p!r} vs {q!r}: {a!r} vs {b!r}"
        )
    return a, b
