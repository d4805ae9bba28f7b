"""Estimators recovering the market's empirical signatures from tick series.

Pure functions over immutable arrays: empirical distributions, exponential
and power-law tail fits, the self-modulation factor series, the trend
regression and binned potential curve, and lag-dependent price diffusion.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def _intervals_of(ticks) -> np.ndarray:
    if hasattr(ticks, "interval"):
        return np.asarray(ticks.interval, dtype=np.float64)
    return _as_float_array(ticks, "intervals")


def _dprices_of(ticks) -> np.ndarray:
    if hasattr(ticks, "dprice"):
        return np.asarray(ticks.dprice, dtype=np.float64)
    return _as_float_array(ticks, "dprices")


def _prices_of(series) -> np.ndarray:
    if hasattr(series, "price"):
        return np.asarray(series.price, dtype=np.float64)
    return _as_float_array(series, "prices")


@dataclass(frozen=True)
class Histogram:
    """Equal-width binned counts; total counts only in-range samples."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise DataError("bin_edges must be strictly increasing with >= 2 entries")
        if counts.shape != (edges.size - 1,) or np.any(counts < 0):
            raise DataError("counts must be non-negative, one per bin")
        if int(counts.sum()) != self.total:
            raise DataError("total must equal the sum of counts")
        edges.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_samples(cls, samples, bins: int = 50) -> "Histogram":
        arr = _as_float_array(samples, "samples")
        if arr.size < 2:
            raise DataError("need at least two samples to bin")
        if not isinstance(bins, int) or bins < 1:
            raise ConfigError(f"bins must be a positive integer (got {bins!r})")
        counts, edges = np.histogram(arr, bins=bins)
        return cls(edges, counts, int(counts.sum()))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def density(self) -> np.ndarray:
        """Counts normalized to a probability density over the binned range."""
        widths = np.diff(self.bin_edges)
        return self.counts / (self.total * widths)


class EmpiricalCcdf:
    """Right-continuous survival function: fraction of samples > x."""

    def __init__(self, samples):
        arr = _as_float_array(samples, "samples")
        if arr.size < 2:
            raise DataError("need at least two samples for an empirical ccdf")
        self._sorted = np.sort(arr)
        self.n = int(arr.size)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        counts_gt = self.n - np.searchsorted(self._sorted, x, side="right")
        result = counts_gt / self.n
        return float(result) if result.ndim == 0 else result

    @property
    def support(self) -> tuple:
        return float(self._sorted[0]), float(self._sorted[-1])


def empirical_ccdf(samples) -> EmpiricalCcdf:
    """Build the empirical survival function of a sample set."""
    return EmpiricalCcdf(samples)


def fit_exponential_rate(samples, tail_fraction: float = 0.25) -> float:
    """Exponential decay rate of the upper tail, from the log survival slope.

    Least squares of log(empirical ccdf) against x over the largest
    tail_fraction of the samples (the maximum, whose ccdf is zero, is
    dropped). Returns the positive rate.
    """
    if not 0 < tail_fraction <= 1:
        raise ConfigError(f"tail_fraction must be in (0, 1] (got {tail_fraction!r})")
    arr = np.sort(_as_float_array(samples, "samples"))
    n = arr.size
    k = int(round(n * tail_fraction))
    if k < 100:
        raise DataError(f"need at least 100 tail samples (got {k})")
    tail = arr[n - k:]
    counts_gt = n - np.searchsorted(arr, tail, side="right")
    keep = counts_gt > 0
    tail = tail[keep]
    if tail.size < 100 or tail[-1] == tail[0]:
        raise DataError("tail too short or degenerate for a rate fit")
    log_ccdf = np.log(counts_gt[keep] / n)
    slope = np.polyfit(tail, log_ccdf, 1)[0]
    if not slope < 0:
        raise DataError("tail is not decaying; no exponential rate")
    return float(-slope)


@dataclass(frozen=True)
class HillTailFit:
    """Hill estimate of a survival-function power exponent, plus diagnostics.

    exponent is beta in ccdf ~ x^-beta using the top k order statistics;
    drift is the relative change when re-estimated from the top k/4, and
    stable is False when that drift exceeds 20% (exponential or otherwise
    non-power tails wander strongly with k).
    """

    exponent: float
    k: int
    tail_start: float
    drift: float
    stable: bool

    def __float__(self) -> float:
        return self.exponent


def _hill_at(descending: np.ndarray, k: int) -> float:
    threshold = descending[k]
    mean_log = float(np.mean(np.log(descending[:k] / threshold)))
    if mean_log <= 0:
        raise DataError("degenerate tail; Hill estimate undefined")
    return 1.0 / mean_log


def hill_tail_exponent(samples, top_fraction: float = 0.01) -> HillTailFit:
    """Hill estimator over the largest top_fraction of positive samples."""
    if not 0 < top_fraction < 1:
        raise ConfigError(f"top_fraction must be in (0, 1) (got {top_fraction!r})")
    arr = _as_float_array(samples, "samples")
    arr = arr[arr > 0]
    k = int(arr.size * top_fraction)
    if k < 500:
        raise DataError(f"need at least 500 tail samples (got {k})")
    descending = np.sort(arr)[::-1]
    exponent = _hill_at(descending, k)
    quarter = _hill_at(descending, k // 4)
    drift = abs(exponent - quarter) / exponent
    return HillTailFit(
        exponent=float(exponent),
        k=k,
        tail_start=float(descending[k]),
        drift=float(drift),
        stable=bool(drift <= 0.20),
    )


def e_series(ticks, tau: float) -> np.ndarray:
    """Self-modulation factors e(n) = I(n) / trailing window mean.

    Uses the identical window rule as the engine's amplitude modulation
    (same compiled routine), without clamps: e(n) is a raw diagnostic. The
    first tick is its own window, so e(1) = 1.
    """
    if not tau > 0:
        raise ConfigError(f"tau must be positive (got {tau!r})")
    intervals = _intervals_of(ticks)
    if intervals.size == 0:
        raise DataError("need at least one tick")
    if np.any(intervals <= 0):
        raise DataError("intervals must be positive")
    out = np.empty_like(intervals)
    _kernels.relative_interval_series(intervals, float(tau), out)
    return out


@dataclass(frozen=True)
class TrendRegression:
    """OLS of the next price change on the weighted moving average.

    b_est = -2 * slope is the implied potential coefficient; float() of the
    result returns b_est.
    """

    slope: float
    b_est: float
    stderr: float
    n_pairs: int

    def __float__(self) -> float:
        return self.b_est


def _wma_series(dprices: np.ndarray, M: int) -> np.ndarray:
    out = np.empty_like(dprices)
    _kernels.weighted_ma_series(dprices, M, out)
    return out


def puck_slope(ticks, M: int) -> TrendRegression:
    """Regress dprice(n+1) on the M-deep weighted moving average at n."""
    if not isinstance(M, int) or M < 1:
        raise ConfigError(f"M must be an integer >= 1 (got {M!r})")
    dprices = _dprices_of(ticks)
    n = dprices.size
    if n < M + 50:
        raise DataError(f"need at least M + 50 = {M + 50} ticks (got {n})")
    wma = _wma_series(dprices, M)
    x = wma[M - 1:n - 1]
    y = dprices[M:n]
    x_var = float(np.var(x))
    if x_var == 0.0:
        raise DataError("moving average has zero variance; slope undefined")
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    dof = max(x.size - 2, 1)
    stderr = math.sqrt(float(residuals @ residuals) / dof / float(np.sum((x - x.mean()) ** 2)))
    return TrendRegression(
        slope=float(slope),
        b_est=float(-2.0 * slope),
        stderr=float(stderr),
        n_pairs=int(x.size),
    )


@dataclass(frozen=True)
class PotentialFit:
    """Binned conditional drift of the price about its own moving average.

    centers/mean_dp/counts describe the occupied bins that met the
    occupancy threshold; potential is the integrated negative drift
    anchored to zero at x = 0. a_left/a_right are the quadratic potential
    coefficients (equal for a symmetric fit), se_left/se_right their rough
    standard errors, b_est = 2*M*a from the joint fit (curve route), and
    b_regression the regression-route estimate over the same window.
    """

    centers: np.ndarray
    mean_dp: np.ndarray
    counts: np.ndarray
    potential: np.ndarray
    a_left: float
    a_right: float
    se_left: float
    se_right: float
    b_est: float
    b_regression: float
    M: int
    window: int


def _quadratic_fit(x: np.ndarray, y: np.ndarray, weights: np.ndarray) -> tuple:
    """Weighted least squares of y = a x^2; returns (a, rough se)."""
    x2 = x * x
    denom = float(np.sum(weights * x2 * x2))
    if denom == 0.0:
        raise DataError("degenerate bin layout; quadratic fit undefined")
    a = float(np.sum(weights * x2 * y) / denom)
    residuals = y - a * x2
    se = math.sqrt(float(np.sum((weights * x2 * residuals) ** 2))) / denom
    return a, se


def potential_curve(ticks, M: int, window: int | None = 500, *,
                    start: int = 0, bins: int = 15, min_count: int = 20,
                    two_sided: bool = False) -> PotentialFit:
    """Estimate the market potential from a window of a tick series.

    x(n) = price(n) minus the simple average of the M+1 latest prices
    (current one included); bins cover the central 98% of x with an
    occupancy threshold; the conditional mean of the next price change per
    bin is the drift, whose negative integral (anchored at x = 0) is the
    potential. A quadratic a*x^2 is fitted to the potential by count-
    weighted least squares, jointly by default or per side with two_sided.
    window=None uses everything after ``start``.
    """
    if not isinstance(M, int) or M < 1:
        raise ConfigError(f"M must be an integer >= 1 (got {M!r})")
    prices = _prices_of(ticks)
    dprices = _dprices_of(ticks)
    n = prices.size
    if window is None:
        window = n - start
    if window < 2 * (min_count + 1):
        raise DataError(f"window {window} too small for occupancy {min_count}")
    end = start + window
    if start < 0 or end > n:
        raise DataError(f"window [{start}, {end}) outside the series of length {n}")
    lo = max(start, M)
    if end - 1 - lo < 2 * min_count:
        raise DataError("too few usable indices in the window (need M prior ticks)")
    idx = np.arange(lo, end - 1)
    # mean over the M+1 prices ending at each index, via cumulative sums
    csum = np.concatenate(([0.0], np.cumsum(prices)))
    ma = (csum[idx + 1] - csum[idx - M]) / (M + 1)
    x = prices[idx] - ma
    y = dprices[idx + 1]
    q_lo, q_hi = np.percentile(x, [1.0, 99.0])
    if not q_lo < q_hi:
        raise DataError("price displacement has no spread; potential undefined")
    keep = (x >= q_lo) & (x <= q_hi)
    x_kept = x[keep]
    y_kept = y[keep]
    edges = np.linspace(q_lo, q_hi, bins + 1)
    which = np.clip(np.digitize(x_kept, edges) - 1, 0, bins - 1)
    counts = np.bincount(which, minlength=bins)
    sums = np.bincount(which, weights=y_kept, minlength=bins)
    valid = counts >= min_count
    if int(valid.sum()) < 3:
        raise DataError("fewer than 3 bins met the occupancy threshold")
    centers_all = 0.5 * (edges[1:] + edges[:-1])
    centers = centers_all[valid]
    mean_dp = sums[valid] / counts[valid]
    weights = counts[valid].astype(np.float64)
    # potential: integrate the negative drift over bin centers, anchor U(0)=0
    potential = np.zeros_like(centers)
    for i in range(1, centers.size):
        dx = centers[i] - centers[i - 1]
        potential[i] = potential[i - 1] - 0.5 * (mean_dp[i] + mean_dp[i - 1]) * dx
    potential = potential - np.interp(0.0, centers, potential)
    a_joint, se_joint = _quadratic_fit(centers, potential, weights)
    if two_sided:
        left = centers < 0
        right = ~left
        if int(left.sum()) < 2 or int(right.sum()) < 2:
            raise DataError("two-sided fit needs at least 2 bins per side")
        a_left, se_left = _quadratic_fit(centers[left], potential[left], weights[left])
        a_right, se_right = _quadratic_fit(centers[right], potential[right], weights[right])
    else:
        a_left = a_right = a_joint
        se_left = se_right = se_joint
    # regression route over the same pairs, on the weighted moving average
    wma = _wma_series(dprices, M)[idx]
    if float(np.var(wma)) > 0:
        b_regression = float(-2.0 * np.polyfit(wma, y, 1)[0])
    else:
        b_regression = float("nan")
    for arr in (centers, mean_dp, potential):
        arr.flags.writeable = False
    counts_out = counts[valid]
    counts_out.flags.writeable = False
    return PotentialFit(
        centers=centers,
        mean_dp=mean_dp,
        counts=counts_out,
        potential=potential,
        a_left=float(a_left),
        a_right=float(a_right),
        se_left=float(se_left),
        se_right=float(se_right),
        b_est=float(2.0 * M * a_joint),
        b_regression=b_regression,
        M=M,
        window=int(window),
    )


def diffusion_sigma(prices, lags) -> np.ndarray:
    """Standard deviation of price displacement over each lag (overlapping)."""
    arr = _prices_of(prices)
    lag_list = [int(lag) for lag in (lags if np.iterable(lags) else [lags])]
    if not lag_list:
        raise ConfigError("need at least one lag")
    n = arr.size
    for lag in lag_list:
        if lag < 1:
            raise ConfigError(f"lags must be positive integers (got {lag})")
        if lag >= n / 10:
            raise DataError(f"lag {lag} too large for a series of length {n} (need lag < n/10)")
    out = np.empty(len(lag_list))
    for i, lag in enumerate(lag_list):
        diffs = arr[lag:] - arr[:-lag]
        out[i] = float(np.std(diffs))
    return out
