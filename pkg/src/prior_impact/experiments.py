"""Synthetic data, sample-size sweeps and decay-rate fits.

Reproducibility contract: every row of a sweep draws its data from its own
generator, seeded by mixing (plan seed, model, n, replicate, attempt) with
SplitMix64.  Rows therefore do not depend on execution order, and a sweep
run serially or across processes produces the same bytes.

Sampling methods (all driven by uniforms from a PCG64 generator):

* normal   -- Box-Muller: ``sqrt(-2 ln u1) * (cos, sin)(2 pi u2)``
* binomial -- ``n`` Bernoulli draws ``u < theta``
* poisson  -- inversion of the Poisson CDF, tabulated far into the tail
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from . import engine
from .errors import DomainError, FitError, ModelError, SandwichError, SweepError
from .models import (
    BinomialSuccess,
    DataSummary,
    ModelCase,
    NormalVariance,
    PoissonRate,
    closed_form_bounds,
    nested_pair,
    posterior_pair,
)
from .numerics import DEFAULT_SETTINGS, QuadratureSettings
from .wasserstein import OracleSettings, w1_distance

__all__ = [
    "CSV_HEADER",
    "SweepPlan",
    "SweepRow",
    "splitmix64",
    "row_seed",
    "generate_sample",
    "run_sweep",
    "fit_decay_slope",
    "write_csv",
    "rows_to_csv",
]

CSV_HEADER = (
    "model", "n", "replicate", "seed", "sum_x", "centered_sq_sum", "successes",
    "lower", "upper", "upper_supnorm", "oracle", "exact",
)
DEFAULT_N_GRID = (10, 32, 100, 316, 1000, 3162, 10000)

_MASK64 = (1 << 64) - 1
_TAG_IDS = {"normal-variance": 1, "binomial": 2, "poisson": 3}
_MAX_ATTEMPTS = 1000
SANDWICH_RTOL = 1e-6


def splitmix64(x: int) -> int:
    """One SplitMix64 step (Steele, Lea & Flood constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def row_seed(seed: int, model: str, n: int, replicate: int, attempt: int = 0) -> int:
    h = splitmix64(seed & _MASK64)
    for part in (_TAG_IDS[model], n, replicate, attempt):
        h = splitmix64(h ^ (part & _MASK64))
    return h


def _tag_of(prior) -> str:
    return prior.tag


def generate_sample(model: str, true_param: float, n: int, seed: int, mu: float = 0.0) -> DataSummary:
    """Sufficient statistics of ``n`` draws from the model at ``true_param``.

    ``true_param`` is the variance for ``normal-variance``, the success
    probability for ``binomial`` and the rate for ``poisson``.
    """
    if model not in _TAG_IDS:
        raise DomainError(f"unknown model {model!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    rng = np.random.Generator(np.random.PCG64(seed & _MASK64))

    if model == "normal-variance":
        if not (math.isfinite(true_param) and true_param > 0):
            raise DomainError("normal variance must be positive")
        m = (n + 1) // 2
        u1 = 1.0 - rng.random(m)  # (0, 1]
        u2 = rng.random(m)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])[:n]
        x = mu + math.sqrt(true_param) * z
        return DataSummary(n=n, centered_sq_sum=float(np.sum((x - mu) ** 2)))

    if model == "binomial":
        if not 0.0 < true_param < 1.0:
            raise DomainError("success probability must lie in (0, 1)")
        return DataSummary(n=n, successes=int(np.count_nonzero(rng.random(n) < true_param)))

    if not (math.isfinite(true_param) and true_param > 0):
        raise DomainError("poisson rate must be positive")
    lam = true_param
    kmax = int(lam + 40.0 * math.sqrt(lam) + 40)
    k = np.arange(kmax + 1)
    cdf = np.cumsum(np.exp(k * math.log(lam) - lam - special.gammaln(k + 1.0)))
    draws = np.searchsorted(cdf, rng.random(n), side="right")
    return DataSummary(n=n, sum_x=int(np.sum(draws)))


@dataclass(frozen=True)
class SweepPlan:
    """A sample-size sweep for one prior comparison.

    ``prior`` is one of the model prior variants (no data); ``true_param``
    drives the data generation; ``mu`` is the known mean in the normal model.
    """

    prior: NormalVariance | BinomialSuccess | PoissonRate
    n_grid: tuple = DEFAULT_N_GRID
    seed: int = 0
    true_param: float = 1.0
    replicates: int = 5
    settings: QuadratureSettings = DEFAULT_SETTINGS

    def __post_init__(self):
        grid = tuple(int(v) for v in self.n_grid)
        if not grid or any(v < 1 for v in grid):
            raise DomainError("n_grid must hold positive integers")
        if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
            raise DomainError("n_grid must be strictly increasing")
        if self.replicates < 1:
            raise DomainError("replicates must be at least 1")
        if not 0 <= self.seed <= _MASK64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "n_grid", grid)

    @property
    def model(self) -> str:
        return _tag_of(self.prior)


@dataclass(frozen=True)
class SweepRow:
    model: str
    n: int
    replicate: int
    seed: int
    sum_x: float | None
    centered_sq_sum: float | None
    successes: int | None
    lower: float
    upper: float
    upper_supnorm: float | None
    oracle: float
    exact: bool

    def sandwich_ok(self) -> bool:
        return (self.lower <= self.oracle + SANDWICH_RTOL * max(1.0, self.oracle)
                and self.oracle <= self.upper * (1.0 + SANDWICH_RTOL))


def _run_row(plan: SweepPlan, task) -> SweepRow:
    n, rep = task
    model = plan.model
    mu = getattr(plan.prior, "mu", 0.0)
    try:
        for attempt in range(_MAX_ATTEMPTS):
            seed = row_seed(plan.seed, model, n, rep, attempt)
            data = generate_sample(model, plan.true_param, n, seed, mu=mu)
            try:
                case = ModelCase(plan.prior, data)
            except ModelError as exc:
                # e.g. no success or no failure: posterior improper, redraw
                last = exc
                continue
            break
        else:
            raise SweepError(f"{model} row n={n} replicate={rep}: no valid sample after "
                             f"{_MAX_ATTEMPTS} draws ({last})", model, n, rep)
        res = closed_form_bounds(case, plan.settings)
        supnorm = res.upper_supnorm
        if supnorm is None:
            supnorm = engine.upper_bound_supnorm(nested_pair(case), plan.settings)
        p1, p2 = posterior_pair(case)
        oracle = w1_distance(p1, p2, OracleSettings(settings=plan.settings))
    except SweepError:
        raise
    except Exception as exc:
        raise SweepError(f"{model} row n={n} replicate={rep} failed: {exc}", model, n, rep) from exc

    row = SweepRow(
        model=model, n=n, replicate=rep, seed=seed,
        sum_x=data.sum_x, centered_sq_sum=data.centered_sq_sum, successes=data.successes,
        lower=res.lower, upper=res.upper, upper_supnorm=supnorm, oracle=oracle, exact=res.exact,
    )
    if not row.sandwich_ok():
        raise SandwichError(
            f"{model} row n={n} replicate={rep}: sandwich violated "
            f"(lower={row.lower!r}, oracle={row.oracle!r}, upper={row.upper!r})",
            model, n, rep,
        )
    return row


def run_sweep(plan: SweepPlan, workers: int = 1) -> list[SweepRow]:
    """One row per (n, replicate), sorted by n then replicate.

    ``workers > 1`` evaluates rows in a process pool; results are identical
    to a serial run.
    """
    tasks = [(n, r) for n in plan.n_grid for r in range(plan.replicates)]
    job = partial(_run_row, plan)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, tasks))
    else:
        rows = [job(t) for t in tasks]
    return sorted(rows, key=lambda r: (r.n, r.replicate))


def fit_decay_slope(rows: Sequence[SweepRow], column: str) -> float:
    """Least-squares slope of log(value) against log(n).

    Replicates are combined per n by their geometric mean first.
    """
    if column not in ("lower", "upper", "oracle", "upper_supnorm"):
        raise FitError(f"cannot fit column {column!r}")
    bad = [r for r in rows if getattr(r, column) is None or not getattr(r, column) > 0]
    if bad:
        where = ", ".join(f"(n={r.n}, replicate={r.replicate})" for r in bad[:5])
        more = "" if len(bad) <= 5 else f" and {len(bad) - 5} more"
        raise FitError(f"column {column!r} has non-positive values in rows {where}{more}")
    by_n: dict[int, list[float]] = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(math.log(getattr(r, column)))
    if len(by_n) < 4:
        raise FitError(f"need at least 4 distinct n values, got {len(by_n)}")
    ns = np.array(sorted(by_n), dtype=float)
    logv = np.array([np.mean(by_n[int(n)]) for n in ns])
    slope, _ = np.polyfit(np.log(ns), logv, 1)
    return float(slope)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(rows: Iterable[SweepRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(getattr(r, name)) if name != "model" else r.model
                         for name in CSV_HEADER])


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
