"""Command-line front end.

    prior-impact bounds --model MODEL DATA PRIOR [--porcelain]
    prior-impact verify --model MODEL DATA PRIOR [--porcelain]
    prior-impact sweep  --model MODEL PRIOR [--n-grid ...] [--output FILE]

Data is given as sufficient statistics: ``--n`` plus ``--s`` (normal
variance), ``--successes`` (binomial) or ``--sum-x`` (Poisson).

Exit codes: 0 success, 1 usage or validation error, 2 sandwich failure,
3 oracle or numerical error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import engine
from .errors import (
    ConvergenceError,
    DomainError,
    FitError,
    ModelError,
    OracleInconsistencyError,
    SandwichError,
    SweepError,
)
from .experiments import DEFAULT_N_GRID, SweepPlan, fit_decay_slope, run_sweep, write_csv
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
from .numerics import QuadratureSettings
from .wasserstein import OracleSettings, w1_crosscheck

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_SANDWICH, EXIT_ORACLE = 0, 1, 2, 3
SANDWICH_RTOL = 1e-6
MODELS = ("normal-variance", "binomial", "poisson")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for sandwich failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if v is None:
        return "inapplicable"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(pairs: list[tuple[str, object]], porcelain: bool, out) -> None:
    if porcelain:
        print(" ".join(f"{k}={_fmt(v)}" for k, v in pairs), file=out)
    else:
        width = max(len(k) for k, _ in pairs)
        for k, v in pairs:
            print(f"{k:<{width}}  {_fmt(v)}", file=out)


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=MODELS)
    g = p.add_argument_group("prior")
    g.add_argument("--alpha", type=float, help="Inverse-Gamma / Beta shape alpha")
    g.add_argument("--beta", type=float, help="Inverse-Gamma scale / Beta shape beta")
    g.add_argument("--mu", type=float, default=0.0, help="known mean (normal-variance)")
    g.add_argument("--a1", type=float, help="Poisson prior 1 shape")
    g.add_argument("--b1", type=float, help="Poisson prior 1 rate")
    g.add_argument("--a2", type=float, help="Poisson prior 2 shape")
    g.add_argument("--b2", type=float, help="Poisson prior 2 rate")
    q = p.add_argument_group("quadrature")
    q.add_argument("--rel-tol", type=float, default=None)
    q.add_argument("--abs-tol", type=float, default=None)
    p.add_argument("--porcelain", action="store_true", help="single-line key=value output")


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("data (sufficient statistics)")
    g.add_argument("--n", type=int, required=True, help="sample size")
    g.add_argument("--s", type=float, help="sum of (x_i - mu)^2, normal-variance")
    g.add_argument("--successes", type=int, help="success count, binomial")
    g.add_argument("--sum-x", type=float, help="sum of observations, poisson")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="prior-impact",
                     description="Wasserstein-1 bounds on the impact of a prior choice.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="closed-form bounds for one data summary")
    _add_prior_flags(b)
    _add_data_flags(b)

    v = sub.add_parser("verify", help="bounds versus the brute-force Wasserstein oracle")
    _add_prior_flags(v)
    _add_data_flags(v)

    s = sub.add_parser("sweep", help="sample-size sweep on synthetic data, written as CSV")
    _add_prior_flags(s)
    s.add_argument("--n-grid", default=",".join(map(str, DEFAULT_N_GRID)),
                   help="comma-separated, strictly increasing sample sizes")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--replicates", type=int, default=5)
    s.add_argument("--true-param", type=float, required=True,
                   help="data-generating variance, success probability or rate")
    s.add_argument("--output", "-o", default="-", help="CSV path ('-' for standard output)")
    s.add_argument("--workers", type=int, default=1)
    return parser


def _settings(args) -> QuadratureSettings:
    kw = {}
    if args.rel_tol is not None:
        kw["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        kw["abs_tol"] = args.abs_tol
    return QuadratureSettings(**kw)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise _UsageError(f"{args.model} requires {flags}")


def _prior(args):
    if args.model == "normal-variance":
        return NormalVariance(alpha=args.alpha or 0.0, beta=args.beta or 0.0, mu=args.mu)
    if args.model == "binomial":
        _need(args, "alpha", "beta")
        return BinomialSuccess(args.alpha, args.beta)
    _need(args, "a1", "b1", "a2", "b2")
    return PoissonRate(args.a1, args.b1, args.a2, args.b2)


def _case(args) -> ModelCase:
    prior = _prior(args)
    if args.model == "normal-variance":
        _need(args, "s")
        data = DataSummary(n=args.n, centered_sq_sum=args.s)
    elif args.model == "binomial":
        _need(args, "successes")
        data = DataSummary(n=args.n, successes=args.successes)
    else:
        _need(args, "sum_x")
        data = DataSummary(n=args.n, sum_x=args.sum_x)
    return ModelCase(prior, data)


def _result_pairs(case, res, supnorm):
    pairs = [("model", case.tag), ("lower", res.lower), ("upper", res.upper),
             ("upper_supnorm", supnorm), ("exact", res.exact)]
    if res.exact:
        pairs.append(("distance", res.distance))
    for key in ("monotonicity", "distance_prefactor_beta1", "distance_prefactor_beta2"):
        if key in res.diagnostics:
            pairs.append((key, res.diagnostics[key]))
    return pairs


def _supnorm(case, res, settings):
    if res.upper_supnorm is not None:
        return res.upper_supnorm
    return engine.upper_bound_supnorm(nested_pair(case), settings)


def cmd_bounds(args, out) -> int:
    settings = _settings(args)
    case = _case(args)
    res = closed_form_bounds(case, settings)
    _emit(_result_pairs(case, res, _supnorm(case, res, settings)), args.porcelain, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    settings = _settings(args)
    case = _case(args)
    res = closed_form_bounds(case, settings)
    supnorm = _supnorm(case, res, settings)
    eng = engine.bounds(nested_pair(case), settings)
    p1, p2 = posterior_pair(case)
    oracle, oracle_q = w1_crosscheck(p1, p2, OracleSettings(settings=settings))
    ok = (res.lower <= oracle + SANDWICH_RTOL * max(1.0, oracle)
          and oracle <= min(res.upper, eng.upper) * (1.0 + SANDWICH_RTOL))
    pairs = [("model", case.tag), ("lower", res.lower), ("engine_lower", eng.lower),
             ("engine_upper", eng.upper), ("closed_form_upper", res.upper),
             ("upper_supnorm", supnorm), ("exact", res.exact),
             ("oracle", oracle), ("oracle_quantile", oracle_q),
             ("sandwich", "PASS" if ok else "FAIL")]
    _emit(pairs, args.porcelain, out)
    return EXIT_OK if ok else EXIT_SANDWICH


def _parse_grid(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise _UsageError(f"--n-grid must be a comma-separated list of integers, got {text!r}")


def cmd_sweep(args, out) -> int:
    plan = SweepPlan(prior=_prior(args), n_grid=_parse_grid(args.n_grid), seed=args.seed,
                     true_param=args.true_param, replicates=args.replicates,
                     settings=_settings(args))
    rows = run_sweep(plan, workers=max(1, args.workers))
    if args.output == "-":
        write_csv(rows, out)
        report = sys.stderr
    else:
        with open(args.output, "w", newline="") as fh:
            write_csv(rows, fh)
        report = out
    pairs = [("model", plan.model), ("rows", len(rows))]
    failures = []
    for column in ("lower", "upper", "oracle"):
        try:
            pairs.append((f"slope_{column}", fit_decay_slope(rows, column)))
        except FitError as exc:
            pairs.append((f"slope_{column}", "error"))
            failures.append(f"slope_{column}: {exc}")
    _emit(pairs, args.porcelain, report)
    for msg in failures:
        print(f"fit error: {msg}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {"bounds": cmd_bounds, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except (_UsageError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SandwichError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SANDWICH
    except (OracleInconsistencyError, ConvergenceError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except DomainError as exc:
        # sweep rows wrap their own errors, so here it is plan validation
        code = EXIT_USAGE if args.command == "sweep" else EXIT_ORACLE
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
