import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prior_impact import numerics
from prior_impact.distributions import BetaDist, GammaDist
from prior_impact.errors import ConvergenceError, DomainError
from prior_impact.numerics import (
    POSITIVE_REALS,
    REAL_LINE,
    UNIT_INTERVAL,
    Interval,
    QuadratureSettings,
    integrate,
    sup_abs_on,
)


class TestInterval:
    def test_ordering(self):
        with pytest.raises(DomainError):
            Interval(1.0, 1.0)
        with pytest.raises(DomainError):
            Interval(2.0, 1.0)

    def test_open_semantics(self):
        assert not UNIT_INTERVAL.contains(0.0)
        assert UNIT_INTERVAL.contains(0.5)
        assert POSITIVE_REALS.includes(Interval(1.0, 2.0))
        assert not UNIT_INTERVAL.includes(POSITIVE_REALS)


class TestSettings:
    @pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"max_depth": 0}])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            QuadratureSettings(**kw)

    def test_defaults(self):
        s = QuadratureSettings()
        assert (s.rel_tol, s.abs_tol, s.max_depth, s.tail_cutoff_mass) == (1e-10, 1e-12, 60, 1e-14)


class TestSpecial:
    @pytest.mark.parametrize("z, expected", [(1.0, 0.0), (0.5, 0.5723649429247001), (10.0, math.log(362880))])
    def test_log_gamma(self, z, expected):
        assert numerics.log_gamma(z) == pytest.approx(expected, rel=1e-13, abs=1e-15)

    @pytest.mark.parametrize("z", [0.0, -1.0, math.inf, math.nan])
    def test_log_gamma_domain(self, z):
        with pytest.raises(DomainError):
            numerics.log_gamma(z)

    def test_log_gamma_recurrence(self):
        rng = np.random.default_rng(3)
        for z in rng.uniform(0.1, 100, 200):
            assert abs(numerics.log_gamma(z + 1) - numerics.log_gamma(z) - math.log(z)) <= 1e-12

    def test_incomplete_gamma(self):
        P = numerics.reg_incomplete_gamma_lower
        assert P(1, 1) == pytest.approx(1 - math.exp(-1), abs=1e-12)
        assert P(3.7, 0) == 0.0
        assert P(2, 2) == pytest.approx(1 - 3 * math.exp(-2), abs=1e-12)
        assert P(2, 2) + numerics.reg_incomplete_gamma_upper(2, 2) == pytest.approx(1.0, abs=1e-15)
        with pytest.raises(DomainError):
            P(0, 1)
        with pytest.raises(DomainError):
            P(1, -1)

    def test_incomplete_beta(self):
        I = numerics.reg_incomplete_beta
        assert I(1, 1, 0.3) == pytest.approx(0.3, abs=1e-12)
        assert I(2, 2, 0.5) == pytest.approx(0.5, abs=1e-12)
        assert I(2, 3, 0.4) == pytest.approx(0.5248, abs=1e-12)
        assert I(2, 3, 0.0) == 0.0 and I(2, 3, 1.0) == 1.0
        with pytest.raises(DomainError):
            I(1, 1, 1.5)

    @given(st.floats(0.05, 50), st.floats(0.05, 50))
    @settings(max_examples=30)
    def test_monotone(self, a, b):
        xs = np.linspace(0, 1, 101)
        ib = numerics.reg_incomplete_beta(a, b, xs)
        assert np.all(np.diff(ib) >= 0)
        ig = numerics.reg_incomplete_gamma_lower(a, xs * 10 * a)
        assert np.all(np.diff(ig) >= 0)


class TestIntegrate:
    def test_examples(self):
        assert integrate(lambda x: np.exp(-x), POSITIVE_REALS) == pytest.approx(1.0, rel=1e-10)
        assert integrate(lambda x: np.ones_like(x), UNIT_INTERVAL) == pytest.approx(1.0, rel=1e-12)
        assert integrate(GammaDist(3, 2).pdf, POSITIVE_REALS) == pytest.approx(1.0, rel=1e-10)

    def test_real_line(self):
        val = integrate(lambda x: np.exp(-0.5 * x * x), REAL_LINE)
        assert val == pytest.approx(math.sqrt(2 * math.pi), rel=1e-10)

    def test_endpoint_singularity(self):
        # int_0^1 x^-1/2 dx = 2
        assert integrate(lambda x: x ** -0.5, UNIT_INTERVAL) == pytest.approx(2.0, rel=1e-9)

    def test_full_output(self):
        val, err = integrate(lambda x: np.exp(-x), POSITIVE_REALS, full_output=True)
        assert err <= max(1e-12, 1e-10 * val)

    def test_divergent_raises(self):
        s = QuadratureSettings(max_depth=8)
        with pytest.raises(ConvergenceError) as info:
            integrate(lambda x: 1.0 / x, UNIT_INTERVAL, s)
        assert info.value.error > 0

    def test_beta_normalisation(self):
        rng = np.random.default_rng(11)
        for a, b in rng.uniform(0.2, 30, size=(50, 2)):
            assert integrate(BetaDist(a, b).pdf, UNIT_INTERVAL) == pytest.approx(1.0, abs=1e-9)

    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=4),
           st.lists(st.floats(-3, 3), min_size=1, max_size=4),
           st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=25)
    def test_linearity(self, c1, c2, a, b):
        def f(x):
            return np.polyval(c1, x) * np.exp(-x * x)

        def g(x):
            return np.polyval(c2, x) * np.exp(-x * x)

        lhs = integrate(lambda x: a * f(x) + b * g(x), REAL_LINE)
        rhs = a * integrate(f, REAL_LINE) + b * integrate(g, REAL_LINE)
        scale = (abs(a) + abs(b)) * 10 + 1
        assert abs(lhs - rhs) <= 1e-9 * scale


class TestSup:
    def test_examples(self):
        assert sup_abs_on(lambda x: x * (1 - x), UNIT_INTERVAL) == pytest.approx(0.25, rel=1e-9)
        assert sup_abs_on(lambda x: -2 * x, UNIT_INTERVAL) == pytest.approx(2.0, rel=1e-6)

    def test_divergent(self):
        # normal-variance rho' with alpha=1, beta=0: -1/t^2
        assert sup_abs_on(lambda t: -t ** -2.0, POSITIVE_REALS) == math.inf

    def test_interior_peak_on_halfline(self):
        # |t e^-t| peaks at 1 with value 1/e
        assert sup_abs_on(lambda t: t * np.exp(-t), POSITIVE_REALS) == pytest.approx(math.exp(-1), rel=1e-9)

    def test_grid_minimum(self):
        with pytest.raises(DomainError):
            sup_abs_on(lambda t: t, UNIT_INTERVAL, grid_points=10)
