"""Command-line interface: simulate, analyze, oracle, experiment.

A config file of key=value lines (flag names without the leading dashes)
can seed any subcommand via --config; explicit flags always win over file
values, and unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import closedform, presets, stats
from .closedform import ClosedFormLaw
from .engine import TickSeries, run
from .errors import (BubbleRegimeError, ConfigError, DataError,
                     DealerSimError, NumericsError)
from .params import params_for_model

_SUBCOMMANDS = ("simulate", "analyze", "oracle", "experiment")


def _add_param_flags(sub) -> None:
    sub.add_argument("--model", choices=("1", "2", "3", "2+3"), default="1",
                     help="model variant (default 1)")
    for flag, help_text in (
        ("--L", "transaction threshold"),
        ("--c", "noise amplitude"),
        ("--dp", "price lattice step"),
        ("--dt", "time per step (must equal dp*dp unless overridden)"),
        ("--tau", "self-modulation window span"),
        ("--clamp-lo", "lower clamp on the window mean"),
        ("--clamp-hi", "upper clamp on the window mean"),
        ("--d", "trend coefficient"),
        ("--d-plus", "trend coefficient for a rising average"),
        ("--d-minus", "trend coefficient for a falling average"),
        ("--p0", "starting price"),
    ):
        sub.add_argument(flag, type=float, help=help_text)
    sub.add_argument("--M", type=int, help="moving-average depth")
    sub.add_argument("--ticks", type=int, help="number of transactions")
    sub.add_argument("--seed", type=int, help="random seed")
    sub.add_argument("--allow-custom-dt", action="store_true",
                     help="permit dt different from dp*dp")
    sub.add_argument("--representation", choices=("reduced", "dealer"),
                     default="reduced", help="simulation bookkeeping to run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dealersim",
        description="dealer-model market simulator with exact statistical laws",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run a simulation and write ticks.csv")
    _add_param_flags(sim)
    sim.add_argument("--out", help="output directory")
    sim.add_argument("--config", help="key=value file of defaults")
    sim.set_defaults(func=_cmd_simulate)

    ana = subs.add_parser("analyze", help="estimate laws from a tick series")
    ana.add_argument("--ticks", required=False, help="path to a ticks.csv")
    ana.add_argument("--M", type=int, default=1, help="moving-average depth")
    ana.add_argument("--tau", type=float, default=150.0,
                     help="self-modulation window span")
    ana.add_argument("--window", type=int, default=500,
                     help="potential-curve window (0 = whole series)")
    ana.add_argument("--start", type=int, default=0,
                     help="first tick index of the potential window")
    ana.add_argument("--bins", type=int, default=15, help="potential-curve bins")
    ana.add_argument("--min-count", type=int, default=20,
                     help="occupancy threshold per bin")
    ana.add_argument("--two-sided", action="store_true",
                     help="fit the potential separately per side")
    ana.add_argument("--lags", default="64,128,256",
                     help="comma-separated diffusion lags")
    ana.add_argument("--out", help="output directory")
    ana.add_argument("--config", help="key=value file of defaults")
    ana.set_defaults(func=_cmd_analyze)

    orc = subs.add_parser("oracle", help="print exact law values as key=value")
    orc.add_argument("--L", type=float, default=0.01, help="transaction threshold")
    orc.add_argument("--c", type=float, default=0.01, help="noise amplitude")
    orc.add_argument("--d", type=float, help="trend coefficient to characterize")
    orc.add_argument("--beta", type=float,
                     help="target tail exponent to solve the trend coefficient for")
    orc.add_argument("--config", help="key=value file of defaults")
    orc.set_defaults(func=_cmd_oracle)

    exp = subs.add_parser("experiment", help="run a named preset and check it")
    exp.add_argument("preset", choices=presets.preset_names(),
                     help="preset name")
    exp.add_argument("--seed", type=int, help="override the preset seed")
    exp.add_argument("--out", help="output directory")
    exp.add_argument("--config", help="key=value file of defaults")
    exp.set_defaults(func=_cmd_experiment)
    return parser


def _read_config_lines(path) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{path}:{lineno}: expected key=value (got {raw!r})")
        entries[key.strip()] = value.strip()
    return entries


_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _coerce(action, key: str, value: str):
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        word = value.lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
        raise ConfigError(f"config key {key!r} wants a boolean (got {value!r})")
    try:
        converted = action.type(value) if action.type else value
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc
    if action.choices is not None and converted not in action.choices:
        raise ConfigError(
            f"config key {key!r} must be one of {', '.join(map(str, action.choices))}")
    return converted


def _prescan(argv) -> tuple:
    command = None
    config = None
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config" and i + 1 < len(argv):
            config = argv[i + 1]
            i += 2
            continue
        if tok.startswith("--config="):
            config = tok.split("=", 1)[1]
        elif command is None and tok in _SUBCOMMANDS:
            command = tok
        i += 1
    return command, config


def parse_config(argv=None) -> argparse.Namespace:
    """Parse argv with optional config-file defaults layered underneath.

    Config values become the subcommand parser's defaults, so explicit
    flags always win over the file and the file wins over coded defaults.
    """
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser = build_parser()
    command, config_path = _prescan(argv)
    if config_path is not None:
        if command is None:
            raise ConfigError("--config requires a subcommand")
        sub = next(a for a in parser._actions
                   if isinstance(a, argparse._SubParsersAction))
        subparser = sub.choices[command]
        actions = {
            act.dest: act
            for act in subparser._actions
            if act.option_strings
        }
        overrides = {}
        for key, value in _read_config_lines(config_path).items():
            dest = key.replace("-", "_")
            if dest not in actions or dest == "config":
                raise ConfigError(f"unknown config key {key!r} for {command}")
            overrides[dest] = _coerce(actions[dest], key, value)
        subparser.set_defaults(**overrides)
    return parser.parse_args(argv)


def _outdir(args) -> str:
    out = getattr(args, "out", None)
    if out:
        return out
    return presets.default_outdir()


def _cmd_simulate(args) -> int:
    overrides = {}
    for dest, name in (
        ("L", "L"), ("c", "c"), ("dp", "dp"), ("dt", "dt"), ("tau", "tau"),
        ("clamp_lo", "clamp_lo"), ("clamp_hi", "clamp_hi"), ("d", "d"),
        ("d_plus", "d_plus"), ("d_minus", "d_minus"), ("p0", "p0"),
        ("M", "M"), ("seed", "seed"), ("ticks", "n_ticks"),
    ):
        value = getattr(args, dest)
        if value is not None:
            overrides[name] = value
    if args.allow_custom_dt:
        overrides["allow_custom_dt"] = True
    params = params_for_model(args.model, **overrides)
    series = run(params, representation=args.representation)
    outdir = _outdir(args)
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "ticks.csv")
    series.to_csv(path)
    print(f"wrote {path} ({series.interval.size} ticks, "
          f"t_final={series.t[-1]:.6g})")
    return 0


def _parse_lags(text: str) -> list:
    try:
        lags = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--lags wants comma-separated integers: {exc}") from exc
    if not lags:
        raise ConfigError("--lags wants at least one lag")
    return lags


def _cmd_analyze(args) -> int:
    if not args.ticks:
        raise ConfigError("analyze needs --ticks pointing at a ticks.csv")
    series = TickSeries.from_csv(args.ticks)
    outdir = _outdir(args)
    os.makedirs(outdir, exist_ok=True)
    presets.write_dist_csv(os.path.join(outdir, "dist.csv"), series)
    written = ["dist.csv"]
    window = None if args.window == 0 else args.window
    try:
        fit = stats.potential_curve(series, args.M, window, start=args.start,
                                    bins=args.bins, min_count=args.min_count,
                                    two_sided=args.two_sided)
        presets.write_potential_csv(os.path.join(outdir, "potential.csv"), fit)
        written.append("potential.csv")
    except DataError as exc:
        print(f"potential curve skipped: {exc}", file=sys.stderr)
    lags = _parse_lags(args.lags)
    summary = presets.summarize(series, M=args.M, tau=args.tau, lags=lags)
    presets.write_kv(os.path.join(outdir, "summary.kv"), summary)
    written.append("summary.kv")
    print(f"wrote {', '.join(written)} in {outdir}")
    return 0


def _cmd_oracle(args) -> int:
    law = ClosedFormLaw(L=args.L, c=args.c)
    rates = closedform.tail_rates(law)
    lines = [
        ("L", law.L),
        ("c", law.c),
        ("mean_interval", closedform.moment("interval", 1, law)),
        ("var_interval", closedform.variance("interval", law)),
        ("mean_abs_dprice", closedform.moment("abs_dprice", 1, law)),
        ("var_abs_dprice", closedform.variance("abs_dprice", law)),
        ("interval_tail_rate", rates.interval_rate),
        ("dprice_tail_rate", rates.dprice_rate),
    ]
    if args.d is not None:
        lines.append(("d", args.d))
        lines.append(("b_mean", closedform.puck_b_mean(args.d, law)))
        try:
            lines.append(("tail_exponent",
                          closedform.solve_tail_exponent(args.d, law)))
        except NumericsError:
            lines.append(("tail_exponent", float("nan")))
        try:
            lines.append(("diffusion_ratio",
                          closedform.diffusion_ratio(args.d, law)))
            lines.append(("bubble_regime", 0))
        except BubbleRegimeError:
            lines.append(("diffusion_ratio", float("nan")))
            lines.append(("bubble_regime", 1))
    if args.beta is not None:
        lines.append(("beta", args.beta))
        lines.append(("trend_coefficient",
                      closedform.solve_trend_coefficient(args.beta, law)))
    for key, value in lines:
        if isinstance(value, float) and not math.isnan(value):
            print(f"{key}={value:.17g}")
        else:
            print(f"{key}={value}")
    return 0


def _cmd_experiment(args) -> int:
    outdir = args.out if args.out else presets.default_outdir(args.preset)
    report = presets.run_experiment(args.preset, seed=args.seed, outdir=outdir)
    for res in report.results:
        state = "PASS" if res.passed else "FAIL"
        detail = f"measured={res.measured:.6g}"
        if res.target is not None:
            detail += f" target={presets._fmt(res.target)}"
        if res.tolerance is not None:
            detail += f" tol={res.tolerance:g}"
        print(f"[{state}] {res.key} {detail} ({res.basis})")
    overall = "PASS" if report.passed else "FAIL"
    n_pass = sum(1 for r in report.results if r.passed)
    print(f"{report.preset}: {overall} ({n_pass}/{len(report.results)} checks) "
          f"-> {outdir}")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    try:
        args = parse_config(argv)
    except DealerSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except DealerSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
