"""Command-line front end: flat key=value configs, subcommands, CSV emission.

Subcommands
-----------
simulate    --config <path> --out <csv>   run an experiment, write trial CSV
prob-curve  --n --p --tau --beta --eps-min --eps-max --steps --out <csv>
bounds      --config <path>               print one trial's regret certificate
verify      [--quick]                     run the library's invariant suite

Config documents are one ``key = value`` per line with ``#`` comments. The
closed key set is ``CONFIG_KEYS`` (n, p, snr, sigma2, seed, num_trials,
lambda, beta, eps, tau, sparsity, magnitude). Unknown keys, type mismatches,
and range violations are rejected with the offending line number. Command-line ``--set key=value``
overrides take precedence over file values; the MDLASSO_SEED environment
variable supplies a default seed but the --seed flag and the file win.

Exit codes: 0 success, 1 invariant/acceptance failure, 2 usage/config error.
"""

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .bounds import regret_certificate
from .errors import ConfigError, MdlassoError
from .lasso import LassoProblem, solve
from .penalty import min_coefficients
from .seeding import substream
from .sim import (ExperimentConfig, ProbCurvePoint, TrialRecord, prob_curve,
                  run_experiment)
from .typical_set import is_typical

_ENV_SEED = "MDLASSO_SEED"


def _parse_int(raw: str) -> int:
    return int(raw, 10)


def _parse_float(raw: str) -> float:
    return float(raw)


# key -> (parser, validator, description); validators raise ValueError
CONFIG_KEYS = {
    "n": (_parse_int, lambda v: v >= 1, "integer >= 1"),
    "p": (_parse_int, lambda v: v >= 1, "integer >= 1"),
    "snr": (_parse_float, lambda v: v > 0.0, "positive real"),
    "sigma2": (_parse_float, lambda v: v > 0.0, "positive real"),
    "seed": (_parse_int, lambda v: True, "integer"),
    "num_trials": (_parse_int, lambda v: v >= 1, "integer >= 1"),
    "lambda": (_parse_float, lambda v: 0.0 < v < 1.0, "real in (0, 1)"),
    "beta": (_parse_float, lambda v: 0.0 < v < 1.0, "real in (0, 1)"),
    "eps": (_parse_float, lambda v: 0.0 < v < 1.0, "real in (0, 1)"),
    "tau": (_parse_float, lambda v: v > 0.0, "positive real"),
    "sparsity": (_parse_int, lambda v: v >= 1, "integer >= 1"),
    "magnitude": (_parse_float, lambda v: v != 0.0, "non-zero real"),
}

_REQUIRED_KEYS = ("n", "p")

TRIAL_CSV_HEADER = "trial,snr,sigma2,d_bhatta,two_hellinger_sq,regret_bound,typical,dominated"
PROB_CURVE_CSV_HEADER = "epsilon,floor_exact,floor_linear,floor_simplified,floor_minus_tau_term"


def _parse_kv_line(lineno, raw: str, values: dict) -> None:
    line = raw.split("#", 1)[0].strip()
    if not line:
        return
    if "=" not in line:
        raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
    key, _, value = line.partition("=")
    key = key.strip()
    value = value.strip()
    if key not in CONFIG_KEYS:
        raise ConfigError(f"line {lineno}: unknown key '{key}'")
    if key in values:
        raise ConfigError(f"line {lineno}: duplicate key '{key}'")
    parser, validator, expected = CONFIG_KEYS[key]
    try:
        parsed = parser(value)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: {key}: expected {expected}, got {value!r}") from None
    if not validator(parsed):
        raise ConfigError(
            f"line {lineno}: {key}: value {value!r} out of range ({expected})")
    values[key] = parsed


def _build_config(values: dict) -> ExperimentConfig:
    for key in _REQUIRED_KEYS:
        if key not in values:
            raise ConfigError(f"missing required key '{key}'")
    if "snr" not in values and "sigma2" not in values:
        raise ConfigError("one of 'snr' and 'sigma2' is required")
    if "seed" not in values:
        raise ConfigError("no seed: provide the 'seed' key, --seed, "
                          f"or the {_ENV_SEED} environment variable")
    try:
        return ExperimentConfig(
            n=values["n"],
            p=values["p"],
            seed=values["seed"],
            snr=values.get("snr"),
            sigma2=values.get("sigma2"),
            num_trials=values.get("num_trials", 100),
            lam=values.get("lambda", 0.5),
            beta=values.get("beta", 0.5),
            eps=values.get("eps", 0.5),
            tau=values.get("tau", 0.03),
            sparsity=values.get("sparsity", min(10, values["p"])),
            magnitude=values.get("magnitude", 1.0),
        )
    except (ValueError, MdlassoError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a config document."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        _parse_kv_line(lineno, raw, values)
    return _build_config(values)


def _load_config(args) -> ExperimentConfig:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        _parse_kv_line(lineno, raw, values)
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        values.pop(item.partition("=")[0].strip(), None)  # override replaces
        _parse_kv_line(f"override '{item}'", item, values)
    if args.seed is not None:
        values["seed"] = args.seed
    elif "seed" not in values and os.environ.get(_ENV_SEED):
        try:
            values["seed"] = int(os.environ[_ENV_SEED])
        except ValueError:
            raise ConfigError(
                f"{_ENV_SEED} must be an integer, got "
                f"{os.environ[_ENV_SEED]!r}") from None
    return _build_config(values)


def _fmt(x: float) -> str:
    return format(float(x), ".10g")


def emit_csv(records: Sequence[TrialRecord], path: str) -> None:
    """Write trial records as CSV: 10 significant digits, LF endings, ordered by trial."""
    if not records:
        raise ValueError("no records to write")
    rows = sorted(records, key=lambda r: r.trial_index)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRIAL_CSV_HEADER + "\n")
        for r in rows:
            fh.write(",".join([
                str(r.trial_index),
                _fmt(r.snr),
                _fmt(r.sigma2),
                _fmt(r.d_bhatta),
                _fmt(r.two_hellinger_sq),
                _fmt(r.regret_bound),
                "true" if r.typical else "false",
                "true" if r.dominated else "false",
            ]) + "\n")


def emit_prob_curve_csv(points: Sequence[ProbCurvePoint], path: str) -> None:
    if not points:
        raise ValueError("no points to write")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(PROB_CURVE_CSV_HEADER + "\n")
        for pt in points:
            fh.write(",".join([
                _fmt(pt.eps),
                _fmt(pt.floor_exact),
                _fmt(pt.floor_linear),
                _fmt(pt.floor_simplified),
                _fmt(pt.floor),
            ]) + "\n")


def _cmd_simulate(args) -> int:
    cfg = _load_config(args)
    records, summary = run_experiment(cfg)
    emit_csv(records, args.out)
    print(f"trials={summary.num_trials} converged={summary.num_converged} "
          f"dominated={summary.num_dominated} "
          f"dominance_fraction={_fmt(summary.dominance_fraction)} "
          f"mean_bound_ratio={_fmt(summary.mean_bound_ratio)} "
          f"typical_fraction={_fmt(summary.typical_fraction)}")
    print(f"wrote {len(records)} rows to {args.out}")
    return 0


def _cmd_prob_curve(args) -> int:
    if args.steps < 2:
        raise ConfigError("--steps must be >= 2")
    if not (0.0 < args.eps_min < args.eps_max < 1.0):
        raise ConfigError("need 0 < eps-min < eps-max < 1")
    grid = np.linspace(args.eps_min, args.eps_max, args.steps)
    points = prob_curve(args.n, args.p, args.tau, args.beta, grid)
    emit_prob_curve_csv(points, args.out)
    print(f"wrote {len(points)} rows to {args.out}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = _load_config(args)
    model = cfg.build_model()
    bc = cfg.bound_config()
    sigma2 = model.sigma2
    rng = substream(cfg.seed, 0)
    X = model.draw_features(rng, cfg.n)
    Y = model.draw_response(rng, X)
    coeffs = min_coefficients(cfg.n, cfg.p, bc.order, bc.beta, bc.eps, sigma2)
    prob = LassoProblem(X, Y, sigma2, coeffs)
    report = solve(prob)
    cert = regret_certificate(prob, model, bc, theta_hat=report.theta_hat)
    items = [
        ("n", cfg.n), ("p", cfg.p),
        ("lambda", bc.order.lam), ("beta", bc.beta),
        ("eps", bc.eps), ("tau", bc.tau),
        ("snr", cfg.resolved_snr()), ("sigma2", sigma2),
        ("mu1", coeffs.mu1), ("mu2", coeffs.mu2),
        ("main_term", cert.main_term), ("regret_bound", cert.bound),
        ("probability_floor", cert.probability_floor),
        ("simplified_floor", cert.simplified_floor),
        ("kappa", cert.kappa),
        ("vacuous", str(cert.vacuous).lower()),
        ("typical", str(is_typical(X, model.cov, bc.eps)).lower()),
        ("solver_converged", str(report.converged).lower()),
        ("solver_iterations", report.iterations),
        ("kkt_residual", report.kkt_residual),
    ]
    for key, val in items:
        print(f"{key} = {_fmt(val) if isinstance(val, float) else val}")
    return 0


def _cmd_verify(args) -> int:
    from .verify import run_verification
    failures = run_verification(quick=args.quick)
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdlasso",
        description="Lasso risk/regret bound calculator and simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded trials, write a CSV")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--set", action="append", metavar="KEY=VALUE")
    sim.set_defaults(func=_cmd_simulate)

    curve = sub.add_parser("prob-curve", help="probability floor over an eps grid")
    curve.add_argument("--n", type=int, required=True)
    curve.add_argument("--p", type=int, required=True)
    curve.add_argument("--tau", type=float, required=True)
    curve.add_argument("--beta", type=float, required=True)
    curve.add_argument("--eps-min", type=float, required=True)
    curve.add_argument("--eps-max", type=float, required=True)
    curve.add_argument("--steps", type=int, required=True)
    curve.add_argument("--out", required=True)
    curve.set_defaults(func=_cmd_prob_curve)

    bnd = sub.add_parser("bounds", help="print one trial's regret certificate")
    bnd.add_argument("--config", required=True)
    bnd.add_argument("--seed", type=int, default=None)
    bnd.add_argument("--set", action="append", metavar="KEY=VALUE")
    bnd.set_defaults(func=_cmd_bounds)

    ver = sub.add_parser("verify", help="run the library invariant suite")
    ver.add_argument("--quick", action="store_true")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MdlassoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
