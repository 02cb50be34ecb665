"""Generic bound engine for two posteriors sharing a likelihood.

A pair of posteriors is described by the base posterior ``p1`` and the
ratio of prior densities ``rho = prior2 / prior1`` (known only up to a
positive constant).  With ``tau1`` the Stein kernel of ``p1``::

    lower = |E[tau1 rho']| / E[rho]  (= |mean1 - mean2|)
    upper =  E[tau1 |rho'|] / E[rho]
    upper_supnorm = sup|rho'| * Var[p1] / E[rho]

all expectations being taken under ``p1``.  When ``rho`` is monotone the
two first quantities coincide and give the Wasserstein-1 distance itself.

Normalising constants never appear: every ratio above is invariant under
``rho -> c * rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import numerics
from .distributions import CustomDensity, Distribution
from .errors import ConvergenceError, DomainError, UndefinedMomentError
from .numerics import DEFAULT_SETTINGS, Interval, QuadratureSettings

__all__ = [
    "NestedPair",
    "ConditionReport",
    "BoundsResult",
    "check_conditions",
    "lower_bound",
    "upper_bound",
    "upper_bound_supnorm",
    "sign_scan",
    "bounds",
]

SIGN_GRID = 1024
SUP_GRID = 4096


@dataclass(frozen=True)
class NestedPair:
    """Base posterior plus prior ratio.

    ``rho_prime`` may be omitted, in which case central differences with
    step ``max(1e-6, 1e-6 |theta|)`` are used.  ``breakpoints`` are optional
    hints (typically quantiles of the second posterior) passed on to the
    quadrature.
    """

    base: Distribution | CustomDensity
    rho: Callable
    rho_prime: Callable | None = None
    support2: Interval | None = None
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.support2 is None:
            object.__setattr__(self, "support2", self.base.support)
        if not self.base.support.includes(self.support2):
            raise DomainError("the second support must be contained in the base support")

    def rho_values(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            return numerics._call_vectorized(self.rho, t)

    def rho_prime_values(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            if self.rho_prime is not None:
                return numerics._call_vectorized(self.rho_prime, t)
            return central_difference(self.rho, t, self.support2)


def central_difference(f, t, support: Interval):
    """Central differences, falling back to one-sided steps at the support edge."""
    t = np.asarray(t, dtype=float)
    h = np.maximum(1e-6, 1e-6 * np.abs(t))
    # keep both stencil points inside the open support
    room_lo = t - support.lo
    room_hi = support.hi - t
    h = np.minimum(h, 0.5 * np.minimum(room_lo, room_hi))
    fp = numerics._call_vectorized(f, t + h)
    fm = numerics._call_vectorized(f, t - h)
    return (fp - fm) / (2.0 * h)


@dataclass(frozen=True)
class ConditionReport:
    cond_i_finite: bool
    cond_iii_lower_limit: float
    cond_iii_upper_limit: float
    notes: str = ""


@dataclass(frozen=True)
class BoundsResult:
    """Lower/upper bounds on the Wasserstein-1 distance of two posteriors.

    ``upper_supnorm`` is ``None`` when the sup-norm bound is inapplicable
    (unbounded ``rho'`` or no base variance).  ``diagnostics`` carries
    model-specific extras.
    """

    lower: float
    upper: float
    upper_supnorm: float | None = None
    exact: bool = False
    oracle: float | None = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (self.lower >= 0 and self.upper >= 0):
            raise ValueError(f"bounds must be non-negative: {self.lower!r}, {self.upper!r}")
        if self.lower > self.upper + 1e-12:
            raise ValueError(f"lower bound {self.lower!r} exceeds upper bound {self.upper!r}")
        if self.exact and abs(self.upper - self.lower) > 1e-10 * max(1.0, self.upper):
            raise ValueError("exact result with distinct lower and upper values")

    @property
    def distance(self) -> float | None:
        """The Wasserstein distance itself when the bounds coincide."""
        return self.upper if self.exact else None

    def with_oracle(self, oracle: float) -> "BoundsResult":
        return BoundsResult(self.lower, self.upper, self.upper_supnorm, self.exact,
                            oracle, dict(self.diagnostics))


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _kernel(base):
    return base.stein_kernel


def _reference_scale(pair: NestedPair) -> float:
    """1 / rho at a central point, so that integrands stay O(1)."""
    bps = getattr(pair.base, "breakpoints", ())
    centre = [b for b in bps if pair.support2.lo < b < pair.support2.hi]
    t0 = centre[len(centre) // 2] if centre else pair.base.mean
    r = float(pair.rho_values(np.array([t0]))[0])
    if math.isfinite(r) and r > 0:
        return 1.0 / r
    return 1.0


def _hints(pair: NestedPair, roots=()):
    bps = tuple(getattr(pair.base, "breakpoints", ())) + tuple(pair.breakpoints) + tuple(roots)
    return tuple(b for b in bps if pair.support2.lo < b < pair.support2.hi)


def _weighted_expectation(pair: NestedPair, g: Callable, settings, roots=()):
    """int over support2 of p1 * rho * scale * g, with scale = 1/rho(centre)."""
    scale = _reference_scale(pair)

    def integrand(t):
        dens = pair.base.pdf(t)
        with np.errstate(all="ignore"):
            w = dens * pair.rho_values(t) * scale
        live = w != 0.0
        out = np.zeros_like(t)
        if np.any(live):
            out[live] = w[live] * g(t[live])
        return out

    return numerics.integrate(integrand, pair.support2, settings,
                              breakpoints=_hints(pair, roots)), scale


def _ratio_terms(pair: NestedPair, settings, roots):
    """Returns (E[tau rho'], E[tau |rho'|], E[rho]) all times the same scale."""
    tau = _kernel(pair.base)
    scale = _reference_scale(pair)

    def base_integral(g):
        def integrand(t):
            dens = pair.base.pdf(t)
            out = np.zeros_like(t)
            live = dens != 0.0
            if np.any(live):
                with np.errstate(all="ignore"):
                    out[live] = dens[live] * g(t[live]) * scale
            return out
        return numerics.integrate(integrand, pair.support2, settings,
                                  breakpoints=_hints(pair, roots))

    e_rho = base_integral(pair.rho_values)
    signed = base_integral(lambda t: tau(t) * pair.rho_prime_values(t))
    absolute = base_integral(lambda t: tau(t) * np.abs(pair.rho_prime_values(t)))
    return signed, absolute, e_rho


def sign_scan(pair: NestedPair, points: int = SIGN_GRID):
    """Sign pattern of rho' on support2.

    Returns ``(constant_sign, roots)``: ``constant_sign`` is True when no sign
    change is seen on a ``points``-point grid (log-spaced near zero and
    infinite ends) nor on the endpoint marches; ``roots`` are the sign
    changes refined by Brent's method.
    """
    grid = numerics.grid_on(pair.support2, points)
    ends = numerics._endpoint_sequences(pair.support2)
    xs = np.unique(np.concatenate([ends[0], grid, ends[1]]))
    with np.errstate(all="ignore"):
        ys = pair.rho_prime_values(xs)
    ok = np.isfinite(ys) & (ys != 0.0)
    xs, ys = xs[ok], ys[ok]
    sgn = np.sign(ys)
    flips = np.nonzero(sgn[1:] != sgn[:-1])[0]
    roots = []

    def fp(t):
        return float(pair.rho_prime_values(np.array([t]))[0])

    for i in flips:
        a, b = float(xs[i]), float(xs[i + 1])
        try:
            roots.append(optimize.brentq(fp, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))
        except (ValueError, RuntimeError):
            roots.append(0.5 * (a + b))
    return len(flips) == 0, tuple(roots)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def check_conditions(pair: NestedPair, settings: QuadratureSettings = DEFAULT_SETTINGS) -> ConditionReport:
    """Numerical spot checks of the integrability/boundary conditions.

    * finiteness of ``E[|X - mean1| rho(X)]`` is judged by convergence of its
      quadrature;
    * the boundary condition is only checked for the identity test function:
      ``rho(t) int_lo^t (y - mean1) p1(y) dy / E[rho]`` is evaluated close to
      each end of support2 (a necessary-condition spot check, not a proof
      over all Lipschitz test functions).

    The derivative-integrability condition has no finite verification
    procedure and is assumed.
    """
    notes = ["derivative-integrability condition assumed, not checked"]
    base = pair.base
    if not base.has_mean():
        notes.insert(0, "base posterior has no mean")
        return ConditionReport(False, math.nan, math.nan, "; ".join(notes))
    mu = base.mean
    try:
        _weighted_expectation(pair, lambda t: np.abs(t - mu), settings)
        finite = True
    except (ConvergenceError, FloatingPointError) as exc:
        finite = False
        notes.insert(0, f"E|X-mean| rho did not converge: {exc}")

    try:
        e_rho, scale = _weighted_expectation(pair, np.ones_like, settings)
    except ConvergenceError as exc:
        notes.append(f"E[rho] did not converge: {exc}")
        e_rho, scale = math.nan, 1.0

    def boundary_value(t):
        # int_lo^t (y - mu) p1 = -tau1(t) p1(t); evaluated by quadrature here
        if t <= mu:
            dom = Interval(base.support.lo, t)
            val = numerics.integrate(lambda y: (y - mu) * base.pdf(y), dom, settings)
        else:
            dom = Interval(t, base.support.hi)
            val = -numerics.integrate(lambda y: (y - mu) * base.pdf(y), dom, settings)
        r = float(pair.rho_values(np.array([t]))[0]) * scale
        return r * val / e_rho

    limits = []
    for seq in _approach_points(pair):
        vals = []
        for t in seq:
            try:
                v = boundary_value(float(t))
            except ConvergenceError:
                continue
            if math.isfinite(v):
                vals.append(v)
        limits.append(vals[-1] if vals else math.nan)
    return ConditionReport(finite, limits[0], limits[1], "; ".join(notes))


def _approach_points(pair: NestedPair):
    lo, hi = pair.support2.lo, pair.support2.hi
    base = pair.base
    out = []
    for end, levels in ((lo, (1e-4, 1e-8, 1e-12)), (hi, (1 - 1e-4, 1 - 1e-8, 1 - 1e-12))):
        pts = []
        if isinstance(base, Distribution) and end in (base.support.lo, base.support.hi):
            pts = [float(base.quantile(p)) for p in levels]
        else:
            scale = 1.0 if not pair.support2.bounded else hi - lo
            sign = 1.0 if end == lo else -1.0
            pts = [end + sign * scale * d for d in (1e-4, 1e-8, 1e-12)]
        out.append([p for p in pts if lo < p < hi])
    return out


def lower_bound(pair: NestedPair, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """|E[tau1 rho']| / E[rho], which equals |mean1 - mean2|."""
    _, roots = sign_scan(pair)
    signed, _, e_rho = _ratio_terms(pair, settings, roots)
    return abs(signed) / e_rho


def upper_bound(pair: NestedPair, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """E[tau1 |rho'|] / E[rho]."""
    _, roots = sign_scan(pair)
    _, absolute, e_rho = _ratio_terms(pair, settings, roots)
    return absolute / e_rho


def upper_bound_supnorm(pair: NestedPair, settings: QuadratureSettings = DEFAULT_SETTINGS,
                        grid_points: int = SUP_GRID) -> float | None:
    """sup|rho'| Var[p1] / E[rho]; ``None`` when inapplicable."""
    try:
        var = pair.base.variance
    except UndefinedMomentError:
        return None
    sup = numerics.sup_abs_on(pair.rho_prime_values, pair.support2, grid_points)
    if not math.isfinite(sup):
        return None
    if sup == 0.0:
        return 0.0
    e_rho, scale = _weighted_expectation(pair, np.ones_like, settings)
    return sup * scale * var / e_rho


def bounds(pair: NestedPair, settings: QuadratureSettings = DEFAULT_SETTINGS) -> BoundsResult:
    """All three bounds plus the monotone-ratio exactness flag."""
    constant, roots = sign_scan(pair)
    signed, absolute, e_rho = _ratio_terms(pair, settings, roots)
    lower = abs(signed) / e_rho
    upper = absolute / e_rho
    return BoundsResult(
        lower=lower,
        upper=upper,
        upper_supnorm=upper_bound_supnorm(pair, settings),
        exact=constant,
        diagnostics={"rho_prime_roots": roots},
    )
