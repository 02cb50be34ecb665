"""Gamma, Inverse-Gamma and Beta families behind one small contract.

Parameterisations (chosen to read like the conjugate updates):

* ``GammaDist(shape, rate)``         density ``rate**shape t**(shape-1) exp(-rate t) / Gamma(shape)``
* ``InverseGammaDist(shape, scale)`` density ``scale**shape t**(-shape-1) exp(-scale/t) / Gamma(shape)``
* ``BetaDist(a, b)``                 density ``t**(a-1) (1-t)**(b-1) / B(a, b)``

Note the Gamma family uses a RATE and the Inverse-Gamma family a SCALE.

Every family provides a closed-form Stein kernel ``tau`` characterised by
``(tau p)' = (mean - t) p`` with ``tau`` vanishing at the support ends.
:func:`stein_kernel_numeric` evaluates the defining integral directly and
serves as an independent check on the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import special

from . import numerics
from .errors import DomainError, UndefinedMomentError
from .numerics import (
    DEFAULT_SETTINGS,
    POSITIVE_REALS,
    UNIT_INTERVAL,
    Interval,
    QuadratureSettings,
)

__all__ = [
    "Distribution",
    "GammaDist",
    "InverseGammaDist",
    "BetaDist",
    "CustomDensity",
    "expect",
    "stein_kernel_numeric",
]

# quantile levels used to seed the initial quadrature partition
_BREAK_LEVELS = (1e-10, 1e-6, 1e-3, 0.02, 0.16, 0.5, 0.84, 0.98, 0.999, 1 - 1e-6, 1 - 1e-10)


def _scalar_or_array(out):
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


class Distribution:
    """Common behaviour; subclasses implement the family specifics."""

    support: Interval
    family: str = ""

    # -- family specifics -------------------------------------------------
    def _logpdf_inside(self, t):
        raise NotImplementedError

    def _cdf_inside(self, t):
        raise NotImplementedError

    def _sf_inside(self, t):
        raise NotImplementedError

    def _stein_kernel_inside(self, t):
        raise NotImplementedError

    def partial_mean_above(self, t0: float) -> float:
        """E[X; X > t0]."""
        raise NotImplementedError

    def partial_mean_below(self, t0: float) -> float:
        """E[X; X < t0]."""
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        raise NotImplementedError

    @property
    def params(self) -> tuple:
        raise NotImplementedError

    # -- shared ------------------------------------------------------------
    def has_mean(self) -> bool:
        try:
            self.mean
        except UndefinedMomentError:
            return False
        return True

    def has_variance(self) -> bool:
        try:
            self.variance
        except UndefinedMomentError:
            return False
        return True

    def logpdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = self.support.contains(t)
        out = np.full(t.shape, -np.inf)
        if np.any(inside):
            out[inside] = self._logpdf_inside(t[inside])
        return _scalar_or_array(out)

    def pdf(self, t):
        """Density; zero outside the open support."""
        return _scalar_or_array(np.exp(self.logpdf(t)))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= self.support.hi, 1.0, 0.0)
        inside = self.support.contains(t)
        if np.any(inside):
            out[inside] = self._cdf_inside(t[inside])
        return _scalar_or_array(out)

    def sf(self, t):
        """Survival function 1 - cdf, computed without cancellation."""
        t = np.asarray(t, dtype=float)
        out = np.where(t <= self.support.lo, 1.0, 0.0)
        inside = self.support.contains(t)
        if np.any(inside):
            out[inside] = self._sf_inside(t[inside])
        return _scalar_or_array(out)

    def stein_kernel(self, t):
        """Closed-form Stein kernel; zero outside the support."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = self.support.contains(t)
        if np.any(inside):
            out[inside] = self._stein_kernel_inside(t[inside])
        return _scalar_or_array(out)

    def _initial_guess(self, p):
        return np.full(p.shape, 1.0)

    def quantile(self, p):
        """Inverse CDF by bracketed, safeguarded Newton iteration.

        For p > 1/2 the equation is solved on the survival function, which
        keeps full relative accuracy in the upper tail.
        """
        p = np.asarray(p, dtype=float)
        if np.any(np.isnan(p)) or np.any(p <= 0) or np.any(p >= 1):
            raise DomainError("quantile levels must lie strictly inside (0, 1)")
        scalar = p.ndim == 0
        p = np.atleast_1d(p)
        upper = p > 0.5
        q = np.where(upper, 1.0 - p, p)

        def resid(x):
            # increasing in x for both branches
            out = np.empty_like(x)
            if np.any(~upper):
                out[~upper] = self._cdf_inside(x[~upper]) - q[~upper]
            if np.any(upper):
                out[upper] = q[upper] - self._sf_inside(x[upper])
            return out

        lo_end, hi_end = self.support.lo, self.support.hi
        x = np.clip(self._initial_guess(p), np.nextafter(lo_end, hi_end), np.nextafter(hi_end, lo_end))
        lo = np.full(p.shape, lo_end)
        hi = np.full(p.shape, hi_end)
        r = resid(x)
        lo = np.where(r < 0, x, lo)
        hi = np.where(r >= 0, x, hi)

        # bracket expansion on half lines
        if math.isinf(hi_end):
            for _ in range(2000):
                need = np.isinf(hi)
                if not np.any(need):
                    break
                trial = lo[need] * 4.0 + 1.0
                rt = _resid_at(resid, x, need, trial)
                hi[need] = np.where(rt >= 0, trial, hi[need])
                lo[need] = np.where(rt < 0, trial, lo[need])

        for _ in range(300):
            with np.errstate(all="ignore"):
                d = np.exp(self._logpdf_inside(x))
                step = r / d
                xn = x - step
            bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
            geo = (lo > 0) & (hi > 4.0 * lo)
            mid = np.where(geo, np.sqrt(lo * hi), 0.5 * (lo + hi))
            xn = np.where(bad, mid, xn)
            done = (np.abs(xn - x) <= 4 * np.finfo(float).eps * np.abs(x)) | (
                hi - lo <= 4 * np.finfo(float).eps * np.abs(hi)
            )
            x = xn
            r = resid(x)
            lo = np.where(r < 0, x, lo)
            hi = np.where(r >= 0, x, hi)
            if np.all(done | (r == 0)):
                break
        return float(x[0]) if scalar else x

    @cached_property
    def breakpoints(self) -> tuple:
        """Quantiles used to seed quadrature partitions."""
        return tuple(float(v) for v in self.quantile(np.array(_BREAK_LEVELS)))

    def __repr__(self):
        args = ", ".join(f"{v!r}" for v in self.params)
        return f"{type(self).__name__}({args})"


def _resid_at(resid, x, mask, trial):
    """Residual at ``trial`` for the masked entries only."""
    full = x.copy()
    full[mask] = trial
    return resid(full)[mask]


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True, repr=False, eq=True)
class GammaDist(Distribution):
    shape: float
    rate: float
    support: Interval = field(default=POSITIVE_REALS, init=False, compare=False)
    family = "gamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    @property
    def params(self):
        return (self.shape, self.rate)

    @cached_property
    def _lognorm(self):
        return self.shape * math.log(self.rate) - math.lgamma(self.shape)

    def _logpdf_inside(self, t):
        return self._lognorm + special.xlogy(self.shape - 1.0, t) - self.rate * t

    def _cdf_inside(self, t):
        return special.gammainc(self.shape, self.rate * t)

    def _sf_inside(self, t):
        return special.gammaincc(self.shape, self.rate * t)

    def _stein_kernel_inside(self, t):
        return t / self.rate

    def _initial_guess(self, p):
        return np.full(p.shape, self.mean)

    @property
    def mean(self):
        return self.shape / self.rate

    @property
    def variance(self):
        return self.shape / self.rate ** 2

    def partial_mean_above(self, t0):
        if t0 <= 0:
            return self.mean
        return self.mean * special.gammaincc(self.shape + 1.0, self.rate * t0)

    def partial_mean_below(self, t0):
        if t0 <= 0:
            return 0.0
        return self.mean * special.gammainc(self.shape + 1.0, self.rate * t0)


@dataclass(frozen=True, repr=False, eq=True)
class InverseGammaDist(Distribution):
    """Inverse-Gamma with shape and SCALE; the mean needs shape > 1."""

    shape: float
    scale: float
    support: Interval = field(default=POSITIVE_REALS, init=False, compare=False)
    family = "inverse-gamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    @property
    def params(self):
        return (self.shape, self.scale)

    @cached_property
    def _lognorm(self):
        return self.shape * math.log(self.scale) - math.lgamma(self.shape)

    def _logpdf_inside(self, t):
        return self._lognorm - (self.shape + 1.0) * np.log(t) - self.scale / t

    def _cdf_inside(self, t):
        return special.gammaincc(self.shape, self.scale / t)

    def _sf_inside(self, t):
        return special.gammainc(self.shape, self.scale / t)

    def _stein_kernel_inside(self, t):
        if self.shape <= 1:
            raise UndefinedMomentError(
                f"Stein kernel undefined: inverse-gamma shape {self.shape} <= 1 has no mean"
            )
        return t * t / (self.shape - 1.0)

    def _initial_guess(self, p):
        return np.full(p.shape, self.scale / self.shape)

    @property
    def mean(self):
        if self.shape <= 1:
            raise UndefinedMomentError(f"inverse-gamma mean needs shape > 1, got {self.shape}")
        return self.scale / (self.shape - 1.0)

    @property
    def variance(self):
        if self.shape <= 2:
            raise UndefinedMomentError(f"inverse-gamma variance needs shape > 2, got {self.shape}")
        a = self.shape
        return self.scale ** 2 / ((a - 1.0) ** 2 * (a - 2.0))

    # E[X; X > t0] = mean * P(InvGamma(shape - 1, scale) > t0)
    def partial_mean_above(self, t0):
        if t0 <= 0:
            return self.mean
        return self.mean * special.gammainc(self.shape - 1.0, self.scale / t0)

    def partial_mean_below(self, t0):
        if t0 <= 0:
            return 0.0
        return self.mean * special.gammaincc(self.shape - 1.0, self.scale / t0)


@dataclass(frozen=True, repr=False, eq=True)
class BetaDist(Distribution):
    a: float
    b: float
    support: Interval = field(default=UNIT_INTERVAL, init=False, compare=False)
    family = "beta"

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("a", self.a))
        object.__setattr__(self, "b", _positive("b", self.b))

    @property
    def params(self):
        return (self.a, self.b)

    @cached_property
    def _lognorm(self):
        return -special.betaln(self.a, self.b)

    def _logpdf_inside(self, t):
        return self._lognorm + special.xlogy(self.a - 1.0, t) + special.xlog1py(self.b - 1.0, -t)

    def _cdf_inside(self, t):
        return special.betainc(self.a, self.b, t)

    def _sf_inside(self, t):
        return special.betaincc(self.a, self.b, t)

    def _stein_kernel_inside(self, t):
        return t * (1.0 - t) / (self.a + self.b)

    def _initial_guess(self, p):
        return np.full(p.shape, self.mean)

    @property
    def mean(self):
        return self.a / (self.a + self.b)

    @property
    def variance(self):
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def partial_mean_above(self, t0):
        if t0 <= 0:
            return self.mean
        if t0 >= 1:
            return 0.0
        return self.mean * special.betaincc(self.a + 1.0, self.b, t0)

    def partial_mean_below(self, t0):
        if t0 <= 0:
            return 0.0
        if t0 >= 1:
            return self.mean
        return self.mean * special.betainc(self.a + 1.0, self.b, t0)


class CustomDensity:
    """A user-supplied density on an interval, for the generic bound engine.

    Only what the engine needs is provided: ``pdf``, ``support``, ``mean``,
    an optional ``variance`` and the numerically evaluated Stein kernel.
    """

    family = "custom"

    def __init__(self, pdf: Callable, support: Interval, mean: float,
                 variance: float | None = None, breakpoints=(),
                 settings: QuadratureSettings = DEFAULT_SETTINGS):
        self._pdf = pdf
        self.support = support
        self._mean = float(mean)
        self._variance = variance
        self.breakpoints = tuple(breakpoints)
        self.settings = settings

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        inside = self.support.contains(t)
        if np.any(inside):
            out[inside] = numerics._call_vectorized(self._pdf, t[inside])
        return _scalar_or_array(out)

    def logpdf(self, t):
        with np.errstate(divide="ignore"):
            return _scalar_or_array(np.log(self.pdf(t)))

    @property
    def mean(self):
        return self._mean

    @property
    def variance(self):
        if self._variance is None:
            raise UndefinedMomentError("no variance supplied for custom density")
        return float(self._variance)

    def has_mean(self):
        return True

    def has_variance(self):
        return self._variance is not None

    def stein_kernel(self, t):
        return stein_kernel_numeric(self.pdf, self.support, self._mean, t,
                                    settings=self.settings, breakpoints=self.breakpoints)


def expect(d, f: Callable, settings: QuadratureSettings = DEFAULT_SETTINGS,
           extra_breakpoints=()) -> float:
    """E[f(X)] for X ~ d by adaptive quadrature against the density."""
    def integrand(t):
        dens = d.pdf(t)
        return np.where(dens == 0.0, 0.0, f(t) * dens)

    pts = tuple(d.breakpoints) + tuple(extra_breakpoints)
    if isinstance(d, BetaDist):
        # floats cannot resolve t near 1, where b < 1 makes the density blow
        # up; fold (1/2, 1) onto (0, 1/2) via Beta(b, a) so both ends sit at 0
        mirror = BetaDist(d.b, d.a)

        def folded(y):
            dens = mirror.pdf(y)
            return np.where(dens == 0.0, 0.0, f(1.0 - y) * dens)

        half = Interval(0.0, 0.5)
        lo_part = numerics.integrate(integrand, half, settings,
                                     breakpoints=[p for p in pts if p < 0.5])
        hi_part = numerics.integrate(folded, half, settings,
                                     breakpoints=[1.0 - p for p in pts if p > 0.5])
        return lo_part + hi_part
    return numerics.integrate(integrand, d.support, settings, breakpoints=pts)


def stein_kernel_numeric(density: Callable, support: Interval, mean: float, t,
                         settings: QuadratureSettings = DEFAULT_SETTINGS,
                         breakpoints=()):
    """Stein kernel ``(1/p(t)) int_lo^t (mean - y) p(y) dy`` by quadrature.

    Above the mean the same quantity is evaluated as
    ``(1/p(t)) int_t^hi (y - mean) p(y) dy`` (the two integrals coincide
    because ``int (mean - y) p = 0``), which avoids cancellation.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(support.contains(ts)):
        raise DomainError("Stein kernel evaluation points must be interior to the support")
    pts = [p for p in breakpoints]
    out = np.empty(ts.shape)
    for i, ti in enumerate(ts):
        pi = float(np.asarray(density(np.array([ti])), dtype=float)[0])
        if ti <= mean:
            dom = Interval(support.lo, ti)

            def g(y):
                return (mean - y) * density(y)
        else:
            dom = Interval(ti, support.hi)

            def g(y):
                return (y - mean) * density(y)
        inner = [p for p in pts if dom.lo < p < dom.hi]
        val = numerics.integrate(g, dom, settings, breakpoints=inner)
        out[i] = val / pi
    return float(out[0]) if np.ndim(t) == 0 else out
