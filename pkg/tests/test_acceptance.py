"""Acceptance criteria 1-9.

Each test prints one ``[acceptance N] PASS|FAIL ...`` line; the lines are
also repeated in the terminal summary (see conftest.py).
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from prior_impact import engine
from prior_impact.cli import main as cli_main
from prior_impact.distributions import (
    BetaDist,
    GammaDist,
    InverseGammaDist,
    expect,
    stein_kernel_numeric,
)
from prior_impact.experiments import SweepPlan, fit_decay_slope, run_sweep
from prior_impact.models import (
    BinomialSuccess,
    DataSummary,
    ModelCase,
    Monotonicity,
    NormalVariance,
    PoissonRate,
    classify_monotone,
    closed_form_bounds,
    nested_pair,
    posterior_pair,
)
from prior_impact.wasserstein import w1_crosscheck, w1_distance

RESULTS: list[str] = []
MODELS = ("normal-variance", "binomial", "poisson")
N_GRID = (10, 32, 100, 316, 1000, 3162, 10000)


def report(number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"[acceptance {number}] {status} {title}"
    if detail:
        line += f" ({detail})"
    if failures:
        line += f": {len(failures)} failure(s), first: {failures[0]}"
    RESULTS.append(line)
    print(line)
    assert not failures, line


# ---------------------------------------------------------------------------
# random valid cases
# ---------------------------------------------------------------------------


def draw_case(rng, model):
    if model == "normal-variance":
        n = int(rng.integers(3, 400))
        s = float(n * rng.uniform(0.2, 5.0))
        prior = NormalVariance(rng.uniform(0, 5), rng.uniform(0, 5))
        return ModelCase(prior, DataSummary(n=n, centered_sq_sum=s))
    if model == "binomial":
        n = int(rng.integers(2, 400))
        x = int(rng.integers(1, n))
        prior = BinomialSuccess(rng.uniform(0.1, 10), rng.uniform(0.1, 10))
        return ModelCase(prior, DataSummary(n=n, successes=x))
    n = int(rng.integers(1, 400))
    sx = int(rng.poisson(n * rng.uniform(0.1, 5.0)))
    a1, a2 = rng.uniform(0, 5, 2) + (0.1 if sx == 0 else 0.0)
    prior = PoissonRate(a1, rng.uniform(0, 5), a2, rng.uniform(0, 5))
    return ModelCase(prior, DataSummary(n=n, sum_x=sx))


def draw_monotone_poisson(rng):
    n = int(rng.integers(1, 2000))
    sx = int(rng.poisson(n * rng.uniform(0.1, 5.0))) + 1
    a1, b1 = rng.uniform(0, 5, 2)
    da, db = rng.uniform(0, 3, 2)
    if rng.random() < 0.5:
        prior = PoissonRate(a1, b1, a1 + da, max(b1 - db, 0.0))   # increasing
    else:
        prior = PoissonRate(a1 + da, b1, a1, b1 + db)             # decreasing
    return ModelCase(prior, DataSummary(n=n, sum_x=sx))


def exact_mean_gap(case):
    """(|mu1 - mu2|, mu1 + mu2) from the model inputs in rational arithmetic."""
    F = Fraction
    p, d = case.prior, case.data
    if isinstance(p, NormalVariance):
        h, s = F(d.n, 2), F(d.centered_sq_sum) / 2
        m1, m2 = s / (h - 1), (s + F(p.beta)) / (h + F(p.alpha) - 1)
    elif isinstance(p, BinomialSuccess):
        a, b = F(p.alpha), F(p.beta)
        m1, m2 = F(d.successes, d.n), (a + d.successes) / (a + b + d.n)
    else:
        sx = F(d.sum_x)
        m1 = (sx + F(p.alpha1)) / (d.n + F(p.beta1))
        m2 = (sx + F(p.alpha2)) / (d.n + F(p.beta2))
    return float(abs(m1 - m2)), float(m1 + m2)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_1_sandwich():
    rng = np.random.default_rng(101)
    failures, worst = [], 0.0
    for model in MODELS:
        for _ in range(100):
            case = draw_case(rng, model)
            res = closed_form_bounds(case)
            try:
                cdf_value, quantile_value = w1_crosscheck(*posterior_pair(case))
            except Exception as exc:  # disagreement or numerical failure
                failures.append(f"{case}: {exc}")
                continue
            worst = max(worst, abs(cdf_value - quantile_value) / max(cdf_value, quantile_value, 1e-300))
            oracle = cdf_value
            if not (res.lower <= oracle * (1 + 1e-6) and oracle <= res.upper * (1 + 1e-6)):
                failures.append(f"{case}: lower={res.lower!r} oracle={oracle!r} upper={res.upper!r}")
    report(1, "sandwich lower <= oracle <= upper, 100 draws x 3 models", failures,
           f"max CDF/quantile disagreement {worst:.1e}")


def test_2_lower_bound_identity():
    rng = np.random.default_rng(202)
    failures, worst = [], 0.0
    for model in MODELS:
        for _ in range(200):
            case = draw_case(rng, model)
            lower = closed_form_bounds(case).lower
            gap, _ = exact_mean_gap(case)
            err = abs(lower - gap)
            if err > 1e-12 * gap:
                failures.append(f"{case}: {lower!r} vs {gap!r}")
            if gap > 0:
                worst = max(worst, err / gap)
    report(2, "closed-form lower == |mean1 - mean2|, 200 draws x 3 models", failures,
           f"max rel error {worst:.1e}")


def test_3_monotone_exact_equality():
    rng = np.random.default_rng(303)
    failures, worst = [], 0.0
    for _ in range(50):
        case = draw_monotone_poisson(rng)
        p = case.prior
        assert classify_monotone(p.alpha1, p.beta1, p.alpha2, p.beta2) is not Monotonicity.NON_MONOTONE
        res = closed_form_bounds(case)
        oracle = w1_distance(*posterior_pair(case))
        eng = engine.bounds(nested_pair(case))
        rel = abs(oracle - res.distance) / max(res.distance, 1e-300)
        worst = max(worst, rel)
        if not res.exact or (res.distance > 0 and rel > 1e-5) or (res.distance == 0 and oracle > 1e-12):
            failures.append(f"{case}: exact={res.distance!r} oracle={oracle!r}")
        if abs(eng.upper - eng.lower) > 1e-9 * max(1.0, eng.upper):
            failures.append(f"{case}: engine lower {eng.lower!r} != upper {eng.upper!r}")
    report(3, "monotone Poisson: oracle == exact, engine lower == upper, 50 draws", failures,
           f"max rel oracle gap {worst:.1e}")


def test_4_zero_cases():
    rng = np.random.default_rng(404)
    failures = []
    for _ in range(10):
        n = int(rng.integers(3, 500))
        case = ModelCase(NormalVariance(0, 0), DataSummary(n=n, centered_sq_sum=float(n * rng.uniform(0.1, 5))))
        res = closed_form_bounds(case)
        oracle = w1_distance(*posterior_pair(case))
        if max(res.lower, res.upper, oracle) > 1e-9:
            failures.append(f"{case}: {res.lower!r} {res.upper!r} {oracle!r}")
    for _ in range(10):
        a, b = rng.uniform(0, 5, 2)
        n = int(rng.integers(1, 500))
        case = ModelCase(PoissonRate(a, b, a, b), DataSummary(n=n, sum_x=int(rng.integers(1, 1000))))
        res = closed_form_bounds(case)
        oracle = w1_distance(*posterior_pair(case))
        if not res.exact or res.distance != 0.0 or oracle > 1e-9:
            failures.append(f"{case}: {res.distance!r} {oracle!r}")
    report(4, "normal alpha=beta=0 and identical Poisson priors give 0", failures)


def test_5_stein_identities():
    rng = np.random.default_rng(505)
    failures = []
    families = {
        "gamma": lambda: GammaDist(rng.uniform(0.3, 60), rng.uniform(0.05, 30)),
        # shape > 3 so that the t^2 test function has the moments it needs
        "inverse-gamma": lambda: InverseGammaDist(rng.uniform(3.2, 60), rng.uniform(0.1, 30)),
        "beta": lambda: BetaDist(rng.uniform(0.3, 40), rng.uniform(0.3, 40)),
    }
    for name, make in families.items():
        for _ in range(30):
            d = make()
            mu, var = d.mean, d.variance
            e_tau = expect(d, d.stein_kernel)
            if abs(e_tau - var) > 1e-8 * var:
                failures.append(f"{d!r}: E[tau]={e_tau!r} Var={var!r}")
            for phi, dphi in ((lambda t: t, np.ones_like), (lambda t: t * t, lambda t: 2 * t)):
                lhs = expect(d, lambda t: d.stein_kernel(t) * dphi(t))
                rhs = expect(d, lambda t: (t - mu) * phi(t))
                if abs(lhs - rhs) > 1e-8 * abs(rhs):
                    failures.append(f"{d!r}: E[tau phi']={lhs!r} E[(X-mu) phi]={rhs!r}")
        for _ in range(3):
            d = make()
            grid = d.quantile(np.linspace(0.02, 0.98, 25))
            numeric = stein_kernel_numeric(d.pdf, d.support, d.mean, grid, breakpoints=d.breakpoints)
            rel = np.max(np.abs(numeric / d.stein_kernel(grid) - 1))
            if rel > 1e-7:
                failures.append(f"{d!r}: numeric kernel off by {rel:.1e}")
    report(5, "Stein identities (30 draws x 3 families) and numeric kernel", failures)


SWEEPS = {
    "normal-variance": (NormalVariance(2.0, 0.5), 1.0),
    "binomial": (BinomialSuccess(2.0, 2.0), 0.3),
    "poisson": (PoissonRate(1.0, 0.0, 0.5, 1.0), 2.0),
}


def test_6_decay_rate():
    start = time.perf_counter()
    failures, slopes = [], []
    for model, (prior, true_param) in SWEEPS.items():
        rows = run_sweep(SweepPlan(prior, N_GRID, seed=20261018, true_param=true_param, replicates=5))
        for column in ("upper", "oracle"):
            slope = fit_decay_slope(rows, column)
            slopes.append(f"{model}/{column}={slope:.3f}")
            if not -1.15 <= slope <= -0.85:
                failures.append(f"{model} {column} slope {slope:.3f}")
    elapsed = time.perf_counter() - start
    if elapsed > 60:
        failures.append(f"sweeps took {elapsed:.1f}s > 60s")
    report(6, "log-log slope in [-1.15, -0.85]", failures, ", ".join(slopes) + f"; {elapsed:.1f}s")


def test_7_typo_adjudication():
    failures = []
    case = ModelCase(PoissonRate(1, 0, 0.5, 1), DataSummary(n=4, sum_x=6))
    res = closed_form_bounds(case)
    oracle = w1_distance(*posterior_pair(case))
    printed = res.diagnostics.get("distance_prefactor_beta2")
    corrected = res.diagnostics.get("distance_prefactor_beta1")
    if printed is None or corrected is None:
        failures.append("diagnostics do not expose both prefactor values")
    else:
        if abs(res.distance - 0.45) > 1e-12 or abs(corrected - res.distance) > 1e-15:
            failures.append(f"distance {res.distance!r} != 0.45")
        gap, _ = exact_mean_gap(case)
        if abs(res.distance - gap) > 1e-12:
            failures.append(f"distance {res.distance!r} != mean gap {gap!r}")
        if abs(oracle - 0.45) > 1e-5 * 0.45:
            failures.append(f"oracle {oracle!r} != 0.45")
        if abs(printed - 0.36) > 1e-12 or abs(printed - oracle) <= 0.10 * oracle:
            failures.append(f"printed-prefactor value {printed!r} not >10% off oracle {oracle!r}")
    report(7, "Poisson prefactor: 0.45 matches oracle, 0.36 does not", failures,
           f"oracle={oracle:.10f} printed={printed!r}")


def test_8_engine_vs_closed_form():
    rng = np.random.default_rng(808)
    failures, worst = [], 0.0
    for model in MODELS:
        for _ in range(100):
            case = draw_case(rng, model)
            closed = closed_form_bounds(case)
            eng = engine.bounds(nested_pair(case))
            rel = abs(eng.lower - closed.lower) / closed.lower if closed.lower > 0 else eng.lower
            worst = max(worst, rel)
            if rel > 1e-8:
                failures.append(f"{case}: engine lower {eng.lower!r} vs {closed.lower!r}")
            if eng.upper > closed.upper + 1e-9:
                failures.append(f"{case}: engine upper {eng.upper!r} > closed {closed.upper!r}")
    report(8, "engine lower == closed-form lower, engine upper <= closed-form upper", failures,
           f"max rel lower error {worst:.1e}")


def test_9_determinism(tmp_path):
    base = ["sweep", "--model", "poisson", "--a1", "1", "--b1", "0", "--a2", "0.5", "--b2", "1",
            "--true-param", "2", "--seed", "42", "--replicates", "2", "--porcelain"]
    paths = [tmp_path / f"run{i}.csv" for i in range(3)]
    codes = [
        cli_main(base + ["--output", str(paths[0])]),
        cli_main(base + ["--output", str(paths[1])]),
        cli_main(base + ["--output", str(paths[2]), "--workers", "4"]),
    ]
    blobs = [p.read_bytes() for p in paths]
    failures = []
    if codes != [0, 0, 0]:
        failures.append(f"exit codes {codes}")
    if not (blobs[0] == blobs[1] == blobs[2]):
        failures.append("CSV bytes differ between runs")
    report(9, "sweep CSV identical across two serial runs and a parallel run", failures,
           f"{len(blobs[0])} bytes")
