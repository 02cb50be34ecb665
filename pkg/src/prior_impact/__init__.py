"""Wasserstein-1 bounds on the impact of the prior in Bayesian models.

Quick start::

    from prior_impact import BinomialSuccess, DataSummary, ModelCase, closed_form_bounds
    case = ModelCase(BinomialSuccess(2, 2), DataSummary(n=10, successes=3))
    closed_form_bounds(case)   # BoundsResult(lower=0.0571..., upper=0.2, ...)
"""

from .distributions import (
    BetaDist,
    CustomDensity,
    Distribution,
    GammaDist,
    InverseGammaDist,
    expect,
    stein_kernel_numeric,
)
from .engine import (
    BoundsResult,
    ConditionReport,
    NestedPair,
    bounds,
    check_conditions,
    lower_bound,
    upper_bound,
    upper_bound_supnorm,
)
from .errors import (
    ConvergenceError,
    DomainError,
    FitError,
    ModelError,
    OracleInconsistencyError,
    PriorImpactError,
    SandwichError,
    SweepError,
    UndefinedMomentError,
)
from .experiments import (
    CSV_HEADER,
    SweepPlan,
    SweepRow,
    fit_decay_slope,
    generate_sample,
    run_sweep,
    write_csv,
)
from .models import (
    BinomialSuccess,
    DataSummary,
    ModelCase,
    Monotonicity,
    NormalVariance,
    PoissonRate,
    binomial_bounds,
    classify_monotone,
    closed_form_bounds,
    nested_pair,
    normal_variance_bounds,
    poisson_distance,
    posterior_pair,
)
from .numerics import DEFAULT_SETTINGS, Interval, QuadratureSettings, integrate
from .wasserstein import OracleMethod, OracleSettings, w1_crosscheck, w1_distance

__version__ = "0.1.0"
