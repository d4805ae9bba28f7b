"""Named experiment presets with machine-checked expectations.

Each preset bundles simulation parameters, a list of analyses to run on
the resulting tick series, and expectations with pinned targets. Targets
are labeled by basis: "closed-form" values come from the exact laws in
closedform, "reference" values are calibration constants, "qualitative"
checks are signs and thresholds. run_experiment writes ticks.csv, the
analysis files, and report.kv into the output directory, and the report
says PASS or FAIL per expectation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import math
import os

import numpy as np

from . import closedform, stats
from .closedform import ClosedFormLaw
from .engine import TickSeries, run, run_schedule
from .errors import BubbleRegimeError, ConfigError, DataError, DealerSimError
from .params import SimParams, params_for_model

_SEED_FIG2 = 20260201
_SEED_FIG78 = 20260708
_SEED_FIG10 = 20261001
_SEED_FIG11 = 20261101
_SEED_FIG12 = 1938

_ENV_OUTDIR = "DEALERSIM_OUT"
_FALLBACK_OUTDIR = "dealersim-out"


@dataclass(frozen=True)
class Expectation:
    """A single checked quantity: key into the measurement table, a mode,
    a target, and the basis the target rests on."""

    key: str
    mode: str  # rel | abs | range | min | max | pos | neg | true
    target: object = None
    tolerance: float | None = None
    basis: str = "qualitative"

    def check(self, measured: float) -> bool:
        m = float(measured)
        if math.isnan(m):
            return False
        if self.mode == "rel":
            return abs(m - self.target) <= self.tolerance * abs(self.target)
        if self.mode == "abs":
            return abs(m - self.target) <= self.tolerance
        if self.mode == "range":
            lo, hi = self.target
            return lo <= m <= hi
        if self.mode == "min":
            return m >= self.target
        if self.mode == "max":
            return m <= self.target
        if self.mode == "pos":
            return m > 0.0
        if self.mode == "neg":
            return m < 0.0
        if self.mode == "true":
            return m == 1.0
        raise ConfigError(f"unknown expectation mode {self.mode!r}")


@dataclass(frozen=True)
class CheckResult:
    key: str
    measured: float
    target: object
    tolerance: float | None
    mode: str
    basis: str
    passed: bool


@dataclass(frozen=True)
class ExperimentReport:
    preset: str
    seed: int
    n_ticks: int
    results: tuple
    measurements: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)


@dataclass(frozen=True)
class ExperimentPreset:
    """name, simulation params (one or a schedule), analyses to run, and
    the expectations checked against the measurements."""

    name: str
    params: tuple
    analyses: tuple
    expected: tuple
    description: str = ""

    def segments(self, seed: int | None = None) -> tuple:
        if seed is None:
            return self.params
        return tuple(replace(p, seed=int(seed)) for p in self.params)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    return str(value)


def write_kv(path, mapping) -> None:
    with open(path, "w", newline="\n") as fh:
        for key, value in mapping.items():
            fh.write(f"{key}={_fmt(value)}\n")


def read_kv(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            out[key] = value
    return out


def write_dist_csv(path, series: TickSeries, bins: int = 50) -> None:
    """Empirical pdf and ccdf of intervals and absolute price changes."""
    rows = []
    for name, samples in (("interval", series.interval),
                          ("abs_dprice", np.abs(series.dprice))):
        hist = stats.Histogram.from_samples(samples, bins=bins)
        ccdf = stats.EmpiricalCcdf(samples)
        density = hist.density()
        for x, p in zip(hist.centers, density):
            rows.append(f"{name},{x:.12g},{p:.12g},{ccdf(x):.12g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("quantity,x,pdf,ccdf\n")
        fh.write("\n".join(rows) + "\n")


def write_potential_csv(path, fit: stats.PotentialFit) -> None:
    """Binned drift and integrated potential, plus the fitted drift line."""
    a = fit.b_est / (2.0 * fit.M)
    with open(path, "w", newline="\n") as fh:
        fh.write("x,mean_dp,count,fit,potential\n")
        for x, dp, cnt, u in zip(fit.centers, fit.mean_dp, fit.counts, fit.potential):
            fh.write(f"{x:.12g},{dp:.12g},{cnt:d},{-2.0 * a * x:.12g},{u:.12g}\n")


def summarize(series: TickSeries, *, M: int = 1, tau: float = 150.0,
              lags=(64, 128, 256)) -> dict:
    """Scalar summary of a tick series; estimators that cannot run on the
    given data contribute nan instead of raising."""
    iv = series.interval
    adp = np.abs(series.dprice)
    out = {
        "n_ticks": int(iv.size),
        "t_final": float(series.t[-1]) if iv.size else float("nan"),
        "mean_interval": float(np.mean(iv)),
        "var_interval": float(np.var(iv)),
        "mean_abs_dprice": float(np.mean(adp)),
        "var_abs_dprice": float(np.var(adp)),
    }
    out["cv_interval"] = (math.sqrt(out["var_interval"]) / out["mean_interval"]
                          if out["mean_interval"] > 0 else float("nan"))

    def guarded(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DealerSimError:
            return None

    rate = guarded(stats.fit_exponential_rate, iv)
    out["interval_tail_rate"] = float(rate) if rate is not None else float("nan")
    rate = guarded(stats.fit_exponential_rate, adp)
    out["dprice_tail_rate"] = float(rate) if rate is not None else float("nan")
    hill = guarded(stats.hill_tail_exponent, adp)
    out["hill_exponent"] = hill.exponent if hill else float("nan")
    out["hill_drift"] = hill.drift if hill else float("nan")
    out["hill_stable"] = (1 if hill.stable else 0) if hill else float("nan")
    e = guarded(stats.e_series, series, tau)
    out["e_mean"] = float(np.mean(e)) if e is not None else float("nan")
    out["e_var"] = float(np.var(e)) if e is not None else float("nan")
    trend = guarded(stats.puck_slope, series, M)
    out["slope"] = trend.slope if trend else float("nan")
    out["b_est"] = trend.b_est if trend else float("nan")
    curve = guarded(stats.potential_curve, series, M, None)
    out["b_est_curve"] = curve.b_est if curve else float("nan")
    out["a_left"] = curve.a_left if curve else float("nan")
    out["a_right"] = curve.a_right if curve else float("nan")
    usable = [lag for lag in lags if lag < iv.size / 10]
    sigma = stats.diffusion_sigma(series, usable) if usable else []
    for lag, s in zip(usable, sigma):
        out[f"sigma_dn{lag}"] = float(s)
    for (la, sa), (lb, sb) in zip(zip(usable, sigma), list(zip(usable, sigma))[1:]):
        if sa > 0:
            out[f"sigma_scaling_{lb}_{la}"] = float(sb / sa / math.sqrt(lb / la))
    return out


def _measure_moments(preset, series, outdir, measurements) -> None:
    iv = series.interval
    adp = np.abs(series.dprice)
    measurements["mean_interval"] = float(np.mean(iv))
    measurements["var_interval"] = float(np.var(iv))
    mean = measurements["mean_interval"]
    measurements["cv_interval"] = (math.sqrt(measurements["var_interval"]) / mean
                                   if mean > 0 else float("nan"))
    measurements["mean_abs_dprice"] = float(np.mean(adp))
    measurements["var_abs_dprice"] = float(np.var(adp))


def _measure_tails(preset, series, outdir, measurements) -> None:
    for key, samples in (("interval_tail_rate", series.interval),
                         ("dprice_tail_rate", np.abs(series.dprice))):
        try:
            measurements[key] = stats.fit_exponential_rate(samples)
        except DataError:
            measurements[key] = float("nan")


def _measure_hill(preset, series, outdir, measurements) -> None:
    try:
        fit = stats.hill_tail_exponent(np.abs(series.dprice))
        measurements["hill_exponent"] = fit.exponent
        measurements["hill_drift"] = fit.drift
        measurements["hill_stable"] = 1.0 if fit.stable else 0.0
    except DataError:
        measurements["hill_exponent"] = float("nan")
        measurements["hill_drift"] = float("nan")
        measurements["hill_stable"] = float("nan")


def _measure_self_modulation(preset, series, outdir, measurements) -> None:
    tau = preset.params[0].tau
    e = stats.e_series(series, tau)
    measurements["e_mean"] = float(np.mean(e))
    measurements["e_var"] = float(np.var(e))
    iv = series.interval
    ccdf = stats.EmpiricalCcdf(iv)
    measurements["interval_ccdf_at_5mean"] = float(ccdf(5.0 * np.mean(iv)))


def _measure_trend(preset, series, outdir, measurements) -> None:
    M = preset.params[0].M
    try:
        fit = stats.puck_slope(series, M)
        measurements["slope"] = fit.slope
        measurements["b_est"] = fit.b_est
    except DataError:
        measurements["slope"] = float("nan")
        measurements["b_est"] = float("nan")


def _write_distributions(preset, series, outdir, measurements) -> None:
    write_dist_csv(os.path.join(outdir, "dist.csv"), series)


def _measure_potential_segments(preset, series, outdir, measurements) -> None:
    labels = ("contrarian", "zero", "following", "mixed")
    offset = 0
    for idx, (p, label) in enumerate(zip(preset.params, labels), start=1):
        two_sided = label == "mixed"
        start = offset + p.n_ticks // 2
        window = p.n_ticks - p.n_ticks // 2
        try:
            fit = stats.potential_curve(series, p.M, window, start=start,
                                        two_sided=two_sided)
        except DataError:
            measurements[f"a_{label}"] = float("nan")
            measurements[f"se_{label}"] = float("nan")
            offset += p.n_ticks
            continue
        write_potential_csv(os.path.join(outdir, f"potential-seg{idx}.csv"), fit)
        if two_sided:
            measurements["a_mixed_left"] = fit.a_left
            measurements["a_mixed_right"] = fit.a_right
        else:
            measurements[f"a_{label}"] = fit.b_est / (2.0 * p.M)
            measurements[f"se_{label}"] = fit.se_left
            measurements[f"b_est_{label}"] = fit.b_est
        offset += p.n_ticks
    a1 = abs(measurements.get("a_contrarian", float("nan")))
    a3 = abs(measurements.get("a_following", float("nan")))
    a0 = abs(measurements.get("a_zero", float("nan")))
    se0 = measurements.get("se_zero", float("nan"))
    floor = max(2.0 * se0, 0.25 * min(a1, a3))
    measurements["noise_floor"] = floor
    measurements["noise_ratio"] = a0 / floor if floor > 0 else float("inf")


def _measure_bubble(preset, series, outdir, measurements) -> None:
    prices = series.price
    n = prices.size
    width = 100
    n_windows = n // width
    # a window counts when the price stays strictly above the starting price
    ups = sum(1 for k in range(n_windows)
              if prices[k * width:(k + 1) * width].min() > series.p0)
    measurements["fraction_windows_up"] = ups / n_windows if n_windows else float("nan")
    excess = prices - series.p0 + 1.0
    if np.all(excess > 0):
        logp = np.log(excess)
        t = series.t
        r = float(np.corrcoef(t, logp)[0, 1])
        measurements["loglinear_r2"] = r * r
        ticks = np.arange(1, n + 1, dtype=np.float64)
        measurements["growth_rate_per_tick"] = float(np.polyfit(ticks, logp, 1)[0])
    else:
        measurements["loglinear_r2"] = float("nan")
        measurements["growth_rate_per_tick"] = float("nan")
    p = preset.params[0]
    law = ClosedFormLaw(L=p.L, c=p.c)
    try:
        closedform.diffusion_ratio(p.d, law)
        measurements["bubble_error_raised"] = 0.0
    except BubbleRegimeError:
        measurements["bubble_error_raised"] = 1.0


_ANALYSES = {
    "moments": _measure_moments,
    "tails": _measure_tails,
    "hill": _measure_hill,
    "self-modulation": _measure_self_modulation,
    "trend": _measure_trend,
    "distributions": _write_distributions,
    "potential-segments": _measure_potential_segments,
    "bubble": _measure_bubble,
}


def _build_presets() -> dict:
    law = ClosedFormLaw(L=0.01, c=0.01)
    rates = closedform.tail_rates(law)
    presets = {}

    base1 = params_for_model("1", n_ticks=100_000, seed=_SEED_FIG2)
    presets["fig2"] = ExperimentPreset(
        name="fig2",
        params=(base1,),
        analyses=("moments", "tails", "distributions"),
        expected=(
            Expectation("mean_interval", "rel",
                        closedform.moment("interval", 1, law), 0.05, "closed-form"),
            Expectation("var_interval", "rel",
                        closedform.variance("interval", law), 0.10, "closed-form"),
            Expectation("mean_abs_dprice", "rel",
                        closedform.moment("abs_dprice", 1, law), 0.05, "closed-form"),
            Expectation("var_abs_dprice", "rel",
                        closedform.variance("abs_dprice", law), 0.10, "closed-form"),
            Expectation("interval_tail_rate", "rel",
                        rates.interval_rate, 0.10, "closed-form"),
            Expectation("dprice_tail_rate", "rel",
                        rates.dprice_rate, 0.10, "closed-form"),
        ),
        description="baseline market: interval and price-change laws",
    )

    base2 = params_for_model("2", n_ticks=100_000, seed=_SEED_FIG78)
    presets["fig7-8"] = ExperimentPreset(
        name="fig7-8",
        params=(base2,),
        analyses=("moments", "distributions", "self-modulation"),
        expected=(
            Expectation("cv_interval", "min", 1.0, None, "qualitative"),
            Expectation("interval_ccdf_at_5mean", "min",
                        math.exp(-5.0), None, "qualitative"),
            Expectation("e_mean", "rel", 1.0, 0.05, "reference"),
        ),
        description="amplitude self-modulation: fat interval tail",
    )

    base3 = params_for_model("3", d=1.25, M=1, n_ticks=1_000_000, seed=_SEED_FIG10)
    presets["fig10"] = ExperimentPreset(
        name="fig10",
        params=(base3,),
        analyses=("moments", "distributions", "hill"),
        expected=(
            Expectation("hill_exponent", "range", (2.5, 3.5), None, "closed-form"),
        ),
        description="trend-following at the cubic-law coefficient",
    )

    seg = dict(M=10, n_ticks=1000, seed=_SEED_FIG11)
    presets["fig11"] = ExperimentPreset(
        name="fig11",
        params=(
            params_for_model("3", d=-1.0, **seg),
            params_for_model("3", d=0.0, **seg),
            params_for_model("3", d=1.0, **seg),
            params_for_model("3", d_plus=1.0, d_minus=-1.0, **seg),
        ),
        analyses=("moments", "trend", "potential-segments"),
        expected=(
            Expectation("a_contrarian", "pos", None, None, "qualitative"),
            Expectation("noise_ratio", "max", 1.0, None, "qualitative"),
            Expectation("a_following", "neg", None, None, "qualitative"),
            Expectation("a_mixed_left", "pos", None, None, "qualitative"),
            Expectation("a_mixed_right", "neg", None, None, "qualitative"),
        ),
        description="market potential curvature under four trend settings",
    )

    base12 = params_for_model("3", d=2.0, M=10, n_ticks=2000, seed=_SEED_FIG12)
    presets["fig12"] = ExperimentPreset(
        name="fig12",
        params=(base12,),
        analyses=("moments", "bubble"),
        expected=(
            Expectation("fraction_windows_up", "min", 0.95, None, "qualitative"),
            Expectation("loglinear_r2", "min", 0.90, None, "qualitative"),
            Expectation("bubble_error_raised", "true", 1.0, None, "closed-form"),
            Expectation("growth_rate_per_tick", "range",
                        (0.001, 0.016), None, "reference"),
        ),
        description="exponential bubble beyond the stable trend range",
    )
    return presets


_PRESETS_CACHE: dict = {}


def preset_names() -> tuple:
    return tuple(_presets().keys())


def _presets() -> dict:
    if not _PRESETS_CACHE:
        _PRESETS_CACHE.update(_build_presets())
    return _PRESETS_CACHE


def get_preset(name: str) -> ExperimentPreset:
    presets = _presets()
    if name not in presets:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(presets))}")
    return presets[name]


def default_outdir(preset_name: str | None = None) -> str:
    root = os.environ.get(_ENV_OUTDIR, "") or _FALLBACK_OUTDIR
    return os.path.join(root, preset_name) if preset_name else root


def run_experiment(preset_name: str, seed: int | None = None,
                   outdir: str | None = None) -> ExperimentReport:
    """Run a preset end to end and write ticks, analyses, and report.kv."""
    preset = get_preset(preset_name)
    segments = preset.segments(seed)
    if len(segments) > 1:
        series = run_schedule(segments)
    else:
        series = run(segments[0])
    if outdir is None:
        outdir = default_outdir(preset.name)
    os.makedirs(outdir, exist_ok=True)
    series.to_csv(os.path.join(outdir, "ticks.csv"))

    measurements: dict = {}
    for name in preset.analyses:
        _ANALYSES[name](preset, series, outdir, measurements)
    base = preset.params[0]
    write_kv(os.path.join(outdir, "summary.kv"),
             summarize(series, M=base.M, tau=base.tau))

    results = []
    for exp in preset.expected:
        measured = float(measurements.get(exp.key, float("nan")))
        results.append(CheckResult(
            key=exp.key, measured=measured, target=exp.target,
            tolerance=exp.tolerance, mode=exp.mode, basis=exp.basis,
            passed=exp.check(measured),
        ))
    report = ExperimentReport(
        preset=preset.name,
        seed=segments[0].seed,
        n_ticks=int(series.interval.size),
        results=tuple(results),
        measurements=dict(measurements),
    )

    lines: dict = {
        "preset": report.preset,
        "seed": report.seed,
        "n_ticks": report.n_ticks,
        "status": "PASS" if report.passed else "FAIL",
    }
    for res in report.results:
        prefix = f"check.{res.key}"
        lines[f"{prefix}.measured"] = res.measured
        if res.target is not None:
            lines[f"{prefix}.target"] = res.target
        if res.tolerance is not None:
            lines[f"{prefix}.tolerance"] = res.tolerance
        lines[f"{prefix}.mode"] = res.mode
        lines[f"{prefix}.basis"] = res.basis
        lines[f"{prefix}.status"] = "PASS" if res.passed else "FAIL"
    for key in sorted(measurements):
        if not any(r.key == key for r in report.results):
            lines[f"measured.{key}"] = measurements[key]
    write_kv(os.path.join(outdir, "report.kv"), lines)
    return report
