"""Command-line front end: ``jumpbench {theory,run,sweep,verify}``.

Exit codes: 0 success, 2 usage or validation error, 3 some cell had censored
runs, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

from jumpbench import theory
from jumpbench.algorithms import ALGORITHMS, DEFAULT_BETA
from jumpbench.core import JumpInstance
from jumpbench.experiments import (
    ExperimentPlan,
    Regime,
    Series,
    default_roster,
    emit_results,
    get_regime,
    parse_grid,
    run_plan,
)
from jumpbench.simulator import DEFAULT_CAP

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CENSORED = 3
EXIT_VERIFY = 4

CONFIG_SCHEMA_VERSION = 1
CONFIG_KEYS = {
    "schema_version", "regime", "n", "k", "delta", "algo", "ea_p", "beta", "R",
    "reps", "seed", "workers", "engine", "out", "cap",
}
DEFAULT_OUT = "jumpbench-out"


class UsageError(Exception):
    """Invalid configuration; reported with exit code 2."""


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err.strerror}") from err
    except json.JSONDecodeError as err:
        raise UsageError(f"config {path} is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"config {path}: unknown key {unknown[0]!r}")
    if data.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise UsageError(
            f"config {path}: key 'schema_version' must be {CONFIG_SCHEMA_VERSION}, "
            f"got {data.get('schema_version')!r}"
        )
    return data


def _settings(args: argparse.Namespace) -> dict:
    """Merge config file values with flags; flags win."""
    merged = dict(_load_config(getattr(args, "config", None)))
    merged.pop("schema_version", None)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged.get("seed") is None:
        env = os.environ.get("JUMPBENCH_SEED")
        merged["seed"] = env if env is not None else 0
    return merged


def _int(settings: dict, key: str, default=None, minimum: int | None = None) -> int:
    value = settings.get(key, default)
    if value is None:
        raise UsageError(f"missing required setting '{key}'")
    try:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        out = int(value)
    except (TypeError, ValueError):
        raise UsageError(f"setting '{key}' must be an integer, got {value!r}") from None
    if minimum is not None and out < minimum:
        raise UsageError(f"setting '{key}' must be at least {minimum}, got {out}")
    return out


def _float(settings: dict, key: str, default: float) -> float:
    value = settings.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"setting '{key}' must be a number, got {value!r}") from None


def _instance(settings: dict) -> JumpInstance:
    n = _int(settings, "n", minimum=1)
    k = _int(settings, "k", minimum=1)
    delta = _int(settings, "delta", default=k, minimum=1)
    if k > n:
        raise UsageError(f"setting 'k' must not exceed n: k={k} > n={n}")
    if delta > k:
        raise UsageError(f"setting 'delta' must not exceed k: delta={delta} > k={k}")
    return JumpInstance(n, k, delta)


def _rate_setting(settings: dict) -> str:
    value = str(settings.get("ea_p", "auto"))
    if value == "auto":
        return "delta/n"
    if value in ("1/n", "delta/2n", "delta/n"):
        return value
    try:
        p = float(value)
    except ValueError:
        raise UsageError(f"setting 'ea_p' must be auto, 1/n, delta/2n, delta/n or a number, got {value!r}") from None
    if not 0 < p <= 0.5:
        raise UsageError(f"setting 'ea_p' must lie in (0, 1/2], got {p}")
    return repr(p)


def _r_setting(settings: dict) -> str:
    value = str(settings.get("R", "auto"))
    if value == "auto":
        return "n^3"
    if value.startswith("n^"):
        try:
            float(value[2:])
        except ValueError:
            raise UsageError(f"setting 'R' must be auto, n^<exponent> or a number, got {value!r}") from None
        return value
    try:
        r = float(value)
    except ValueError:
        raise UsageError(f"setting 'R' must be auto, n^<exponent> or a number, got {value!r}") from None
    if not r > 1:
        raise UsageError(f"setting 'R' must exceed 1, got {r}")
    return repr(r)


def _beta(settings: dict) -> float:
    beta = _float(settings, "beta", DEFAULT_BETA)
    if not beta > 1:
        raise UsageError(f"setting 'beta' must exceed 1, got {beta}")
    return beta


def _series(algo: str, settings: dict) -> Series:
    if algo not in ALGORITHMS:
        raise UsageError(f"setting 'algo' must be one of {', '.join(ALGORITHMS)}, got {algo!r}")
    if algo == "ea":
        return Series("ea", _rate_setting(settings))
    if algo == "fea":
        return Series("fea", f"{_beta(settings):g}")
    return Series(algo, _r_setting(settings))


def _engine(settings: dict) -> str:
    engine = settings.get("engine", "auto")
    if engine not in ("full", "partial", "auto"):
        raise UsageError(f"setting 'engine' must be full, partial or auto, got {engine!r}")
    return engine


def _plan(settings: dict, regime: Regime, roster, grid) -> ExperimentPlan:
    return ExperimentPlan(
        regime=regime,
        roster=tuple(roster),
        replications=_int(settings, "reps", default=1000, minimum=2),
        seed=_int(settings, "seed", minimum=0),
        engine=_engine(settings),
        cap=_int(settings, "cap", default=DEFAULT_CAP, minimum=1),
        workers=_int(settings, "workers", default=1, minimum=1),
        n_grid=grid,
    )


def _fmt(x: float) -> str:
    if x is None:
        return "-"
    if not math.isfinite(x):
        return str(x)
    return f"{x:.6g}"


def _log10(estimate) -> str:
    return f"{estimate.log10:.4f}"


def _row(label: str, linear: str, log10: str, note: str = "") -> str:
    return f"  {label:<38} {linear:>14}  {log10:>10}  {note}"


def cmd_theory(args) -> int:
    settings = _settings(args)
    inst = _instance(settings)
    n, k, delta = inst.n, inst.k, inst.delta
    rate_rule = _rate_setting(settings)
    p = Series("ea", rate_rule).params(inst)["p"]
    beta = _beta(settings)
    r_rule = _r_setting(settings)
    R = Series("sdrls-star", r_rule).params(inst)["R"]

    print(f"Jump_(k,delta) with n={n}, k={k}, delta={delta}  (ell = {inst.ell})")
    if not theory.in_standard_regime(inst):
        print(
            f"warning: outside the standard regime: k ln n = {k * math.log(n):.4g} "
            f"> n^(1/3) = {n ** (1 / 3):.4g}"
        )
    if delta == 1:
        print("note: delta = 1 makes the local optimum level an ordinary OneMax level;"
              " the optimal rate is 1/n")
    print(_row("quantity", "value", "log10"))
    if p > 0.5:
        print(f"  rate p = {p:g} exceeds 1/2; (1+1) EA rows skipped")
    else:
        f = theory.big_f(inst, p)
        log10_f = f.log_value / math.log(10)
        print(_row(f"EA rate p ({rate_rule.replace('delta', 'd')})", _fmt(p), f"{math.log10(p):.4f}"))
        print(_row("F(p)", _fmt(f.value), f"{log10_f:.4f}"))
        print(_row("1/F(p)", _fmt(1 / f.value if f.value > 0 else math.inf), f"{-log10_f:.4f}"))
        lower, upper = theory.ea_runtime_bounds(inst, p)
        print(_row("EA runtime lower bound", _fmt(lower.value), _log10(lower)))
        print(_row("EA runtime upper bound", _fmt(upper.value), _log10(upper)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", theory.RegimeWarning)
        exact, asym = theory.optimal_rate_runtime(inst)
    print(_row("1/F(delta/n) (optimal rate)", _fmt(exact.value), _log10(exact)))
    print(_row("C(k,d)^-1 (e n/d)^d (asymptotic)", _fmt(asym.value), _log10(asym),
               "" if asym.valid else "outside validity range"))
    if n >= 2:
        q = theory.fea_jump_success(inst, beta)
        print(_row(f"FEA beta={beta:g} crossing prob q", _fmt(q),
                   f"{math.log10(q):.4f}" if q > 0 else "-inf"))
        print(_row("1/q", _fmt(1 / q if q > 0 else math.inf),
                   f"{-math.log10(q):.4f}" if q > 0 else "inf"))
        try:
            env = theory.fea_runtime_envelope(inst, beta)
            print(_row("FEA envelope (constant omitted)", _fmt(env.value), _log10(env)))
        except ValueError as err:
            print(f"  FEA envelope skipped: {err}")
    try:
        lower, upper, tight = theory.sdrls_runtime_estimate(inst, R)
        print(_row(f"SD-RLS* lower (R={_fmt(R)})", _fmt(lower.value), _log10(lower)))
        print(_row("SD-RLS* upper", _fmt(upper.value), _log10(upper)))
        print(_row("SD-RLS* tight", _fmt(tight.value), _log10(tight), tight.note))
    except ValueError as err:
        print(f"  SD-RLS* estimates skipped: {err}")
    return EXIT_OK


def _summarize(stats) -> None:
    print(f"{'series':<26} {'n':>5} {'k':>4} {'d':>3} {'reps':>6} {'mean':>12} "
          f"{'stderr':>11} {'theory':>12} {'cens':>5}")
    for s in stats:
        print(f"{s.series:<26} {s.n:>5} {s.k:>4} {s.delta:>3} {s.replications:>6} "
              f"{_fmt(s.mean_evals):>12} {_fmt(s.stderr):>11} {_fmt(s.theory_tight):>12} "
              f"{s.censored:>5}")


def _finish(stats, settings: dict) -> int:
    out = settings.get("out") or DEFAULT_OUT
    paths = emit_results(stats, out)
    _summarize(stats)
    for path in paths:
        print(f"wrote {path}")
    censored = sum(s.censored for s in stats)
    if censored:
        print(f"warning: {censored} run(s) hit the evaluation cap", file=sys.stderr)
        return EXIT_CENSORED
    return EXIT_OK


def cmd_run(args) -> int:
    settings = _settings(args)
    inst = _instance(settings)
    series = _series(settings.get("algo", "ea"), settings)
    regime = Regime(
        "custom", lambda n, k=inst.k: k, lambda k, d=inst.delta: d, (inst.n,),
        f"k = {inst.k}, delta = {inst.delta}",
    )
    stats = run_plan(_plan(settings, regime, [series], (inst.n,)))
    return _finish(stats, settings)


def cmd_sweep(args) -> int:
    settings = _settings(args)
    name = settings.get("regime")
    if name is None:
        raise UsageError("missing required setting 'regime'")
    try:
        regime = get_regime(name)
    except ValueError as err:
        raise UsageError(f"setting 'regime': {err}") from None
    grid = None
    if settings.get("n") is not None:
        try:
            grid = parse_grid(str(settings["n"]))
        except ValueError as err:
            raise UsageError(f"setting 'n': {err}") from None
    try:
        for n in grid or regime.n_grid:
            regime.instance(n)
    except ValueError as err:
        raise UsageError(f"setting 'n': regime {name} at n={n}: {err}") from None
    if settings.get("algo") is not None:
        roster = [_series(settings["algo"], settings)]
    else:
        roster = default_roster(_beta(settings), _r_setting(settings))
    stats = run_plan(_plan(settings, regime, roster, grid))
    return _finish(stats, settings)


def cmd_verify(args) -> int:
    from jumpbench.verify import verify

    settings = _settings(args)
    seed = _int(settings, "seed", minimum=0)
    report = verify(args.level, runs=args.runs, seed=seed, progress=None)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpbench",
        description="Exact theory and simulation of evolutionary algorithms on Jump_(k,delta).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        p.add_argument("--config", help="JSON settings file (flags override it)")
        p.add_argument("--seed", type=int, help="master seed (default: $JUMPBENCH_SEED or 0)")
        if instance:
            p.add_argument("--n", help="problem size (sweep: grid like 60:160:20)")
            p.add_argument("--k", type=int, help="distance of the local optimum to the optimum")
            p.add_argument("--delta", type=int, help="valley width (default k)")
            p.add_argument("--ea-p", dest="ea_p",
                           help="EA rate: auto (=delta/n), 1/n, delta/2n, delta/n or a number")
            p.add_argument("--beta", type=float, help=f"power-law exponent (default {DEFAULT_BETA})")
            p.add_argument("--R", dest="R", help="stagnation control parameter: auto (=n^3), n^x or a number")

    def batch(p):
        p.add_argument("--algo", choices=sorted(ALGORITHMS))
        p.add_argument("--reps", type=int, help="replications per cell (default 1000)")
        p.add_argument("--workers", type=int, help="parallel cells (default 1)")
        p.add_argument("--engine", choices=("full", "partial", "auto"))
        p.add_argument("--cap", type=int, help=f"evaluation cap per run (default {DEFAULT_CAP:.0e})")
        p.add_argument("--out", help=f"output directory (default ./{DEFAULT_OUT})")

    p = sub.add_parser("theory", help="print exact probabilities and runtime predictions")
    common(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("run", help="simulate one algorithm on one instance")
    common(p)
    batch(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="simulate a roster over a regime's n grid")
    common(p)
    batch(p)
    p.add_argument("--regime", help="regime name, e.g. classic4, k6d4, log3, pow4, quarter")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="compare the library against brute-force oracles")
    common(p, instance=False)
    p.add_argument("level", nargs="?", choices=("quick", "full"), default="quick")
    p.add_argument("--runs", type=int, default=2000,
                   help="runs per engine for cross-validation (full level)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"jumpbench {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"jumpbench {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
