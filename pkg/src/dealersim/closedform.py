"""Exact statistical laws of the two-dealer market and trend relations.

Everything here is analytic: series for the transaction-interval law (q1),
elementary closed forms for the price-change law (q2), exact rational
moments through secant (Euler) numbers, a Dirichlet-beta evaluator, the
power-law exponent solvers for the trend model, and the market-potential /
diffusion relations.

Each series is evaluated through two analytically equal representations, a
spectral sum (fast for large times) and an image/first-passage sum (fast for
small times), switched at u = c^2 I / L^2 = 2/pi so convergence is always
geometric-or-better. The price-change series collapse to elementary closed
forms (a logistic-kernel pdf and an arctan ccdf), which is what the
alternating geometric structure sums to exactly.

One convention worth calling out: the k-th moment of |price change| uses the
Dirichlet beta value at k+1. Writing the moment integral against the series
term by term produces beta(k+1), and the mean 4*K*L/pi^2 (K = Catalan's
constant = beta(2)) confirms the index; a beta(k) variant fails both checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import BubbleRegimeError, ConfigError, NumericsError

# spectral/image switchover in the dimensionless time u = c^2 t / L^2
_SWITCH_U = 2.0 / math.pi

# largest exponent handled by the moment formulas and root brackets
BETA_MAX = 64.0

# documented ceiling for the exact secant-number recurrence (cost control)
MAX_EULER_INDEX = 256


@dataclass(frozen=True)
class ClosedFormLaw:
    """Spread L and noise amplitude c plus series evaluation controls.

    series_terms caps any series loop; tolerance is the relative truncation
    target. Both defaults leave every result accurate to double precision
    (loops stop adaptively long before the cap).
    """

    L: float = 0.01
    c: float = 0.01
    series_terms: int = 200
    tolerance: float = 1e-14

    def __post_init__(self):
        if not isinstance(self.L, (int, float)) or not self.L > 0:
            raise ConfigError(f"L must be positive (got {self.L!r})")
        if not isinstance(self.c, (int, float)) or not self.c > 0:
            raise ConfigError(f"c must be positive (got {self.c!r})")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "c", float(self.c))
        if not isinstance(self.series_terms, int) or self.series_terms < 8:
            raise ConfigError(f"series_terms must be an integer >= 8 (got {self.series_terms!r})")
        if not isinstance(self.tolerance, float) or not 0 < self.tolerance <= 1e-6:
            raise ConfigError(f"tolerance must be in (0, 1e-6] (got {self.tolerance!r})")

    @property
    def interval_scale(self) -> float:
        """Characteristic time L^2/c^2 entering every interval formula."""
        return (self.L / self.c) ** 2


class TailRates(NamedTuple):
    interval_rate: float
    dprice_rate: float


@dataclass(frozen=True)
class PuckParams:
    """Trend coefficient with its implied mean potential coefficient."""

    d: float
    b_mean: float
    M: int = 1

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 1:
            raise ConfigError(f"M must be an integer >= 1 (got {self.M!r})")

    @classmethod
    def from_trend(cls, d: float, law: ClosedFormLaw, M: int = 1) -> "PuckParams":
        return cls(d=float(d), b_mean=puck_b_mean(d, law), M=M)


_EULER_CACHE = [1]


def euler_number(k: int) -> int:
    """Exact secant number: sec x = sum E_k x^(2k) / (2k)!.

    Computed by the integer recurrence obtained from sec * cos = 1; values
    grow super-exponentially, so k is capped at MAX_EULER_INDEX purely to
    bound runtime.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 0 or k > MAX_EULER_INDEX:
        raise ConfigError(f"k must be an integer in [0, {MAX_EULER_INDEX}] (got {k!r})")
    while len(_EULER_CACHE) <= k:
        m = len(_EULER_CACHE)
        acc = 0
        for j in range(1, m + 1):
            acc += (-1) ** (j + 1) * math.comb(2 * m, 2 * j) * _EULER_CACHE[m - j]
        _EULER_CACHE.append(acc)
    return _EULER_CACHE[k]


def dirichlet_beta(s: float) -> float:
    """Dirichlet beta: sum over n >= 0 of (-1)^n / (2n+1)^s, for s > 0.

    Uses the Cohen/Rodriguez-Villegas/Zagier Chebyshev acceleration for
    alternating series with totally monotone terms; 48 stages leave the
    truncation error far below double precision for every s > 0.
    """
    s = float(s)
    if not s > 0:
        raise ConfigError(f"s must be positive (got {s!r})")
    n = 48
    d = (3.0 + math.sqrt(8.0)) ** n
    d = (d + 1.0 / d) / 2.0
    b = -1.0
    c = -d
    acc = 0.0
    for k in range(n):
        c = b - c
        acc += c * (2 * k + 1) ** (-s)
        b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0))
    return acc / d


def _q1_pdf(I: float, law: ClosedFormLaw) -> float:
    L, c = law.L, law.c
    if I == 0.0:
        return 0.0
    u = (c * c * I) / (L * L)
    if u >= _SWITCH_U:
        # spectral branch: rates (c pi (2n-1) / 2L)^2, alternating odd sum
        base = (math.pi * c / (2.0 * L)) ** 2
        acc = 0.0
        for n in range(1, law.series_terms + 1):
            m = 2 * n - 1
            rate = base * m * m
            term = ((-1) ** (n + 1)) * rate * math.exp(-rate * I) / m
            acc += term
            if abs(term) <= law.tolerance * abs(acc) and n >= 2:
                break
        return (4.0 / math.pi) * acc
    # image branch: first-passage density from the centered start
    acc = 0.0
    inv_sqrt_pi = 1.0 / math.sqrt(math.pi)
    pref = I ** -1.5
    for j in range(law.series_terms):
        a = (2 * j + 1) * L / (2.0 * c)
        term = ((-1) ** j) * 2.0 * a * inv_sqrt_pi * pref * math.exp(-(a * a) / I)
        acc += term
        if abs(term) <= law.tolerance * abs(acc) and j >= 1:
            break
    return acc


def _q1_ccdf(I: float, law: ClosedFormLaw) -> float:
    L, c = law.L, law.c
    if I == 0.0:
        return 1.0
    u = (c * c * I) / (L * L)
    if u >= _SWITCH_U:
        base = (math.pi * c / (2.0 * L)) ** 2
        acc = 0.0
        for n in range(1, law.series_terms + 1):
            m = 2 * n - 1
            term = ((-1) ** (n + 1)) * math.exp(-base * m * m * I) / m
            acc += term
            if abs(term) <= law.tolerance * abs(acc) and n >= 2:
                break
        return (4.0 / math.pi) * acc
    half_inv_sqrt_u = 0.5 / math.sqrt(u)
    acc = 0.0
    for j in range(law.series_terms):
        term = ((-1) ** j) * math.erfc((2 * j + 1) * half_inv_sqrt_u)
        acc += term
        if abs(term) <= law.tolerance * max(abs(acc), 1e-300) and j >= 1:
            break
    return 1.0 - 2.0 * acc


def q1(I: float, law: ClosedFormLaw, which: str = "pdf") -> float:
    """Transaction-interval law: density or survival function at I >= 0."""
    I = float(I)
    if I < 0:
        raise ValueError(f"interval must be >= 0 (got {I!r})")
    if which == "pdf":
        return _q1_pdf(I, law)
    if which == "ccdf":
        return _q1_ccdf(I, law)
    raise ValueError(f"which must be 'pdf' or 'ccdf' (got {which!r})")


def q2(x: float, law: ClosedFormLaw, which: str = "pdf") -> float:
    """Price-change magnitude law: density or survival function at x >= 0.

    These are the exact sums of the alternating geometric series:
    pdf = (4/L) r / (1 + r^2) and ccdf = (4/pi) atan(r), r = exp(-pi x / L).
    """
    x = float(x)
    if x < 0:
        raise ValueError(f"price change must be >= 0 (got {x!r})")
    r = math.exp(-math.pi * x / law.L)
    if which == "pdf":
        return (4.0 / law.L) * r / (1.0 + r * r)
    if which == "ccdf":
        return (4.0 / math.pi) * math.atan(r)
    raise ValueError(f"which must be 'pdf' or 'ccdf' (got {which!r})")


def moment(kind: str, k: int, law: ClosedFormLaw) -> float:
    """Exact k-th moment of the interval or |price change| law.

    interval: (L/c)^(2k) * k! * E_k / (2k)!  (E_k the secant numbers)
    abs_dprice: 4 * L^k * k! * beta(k+1) / pi^(k+1)
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 1 or k > int(BETA_MAX):
        raise ValueError(f"k must be an integer in [1, {int(BETA_MAX)}] (got {k!r})")
    if kind == "interval":
        rational = Fraction(math.factorial(k) * euler_number(k), math.factorial(2 * k))
        return float(rational) * law.interval_scale ** k
    if kind == "abs_dprice":
        return (4.0 * law.L ** k * math.factorial(k)
                * dirichlet_beta(k + 1) / math.pi ** (k + 1))
    raise ValueError(f"kind must be 'interval' or 'abs_dprice' (got {kind!r})")


def variance(kind: str, law: ClosedFormLaw) -> float:
    """Exact variance of the interval or |price change| law."""
    return moment(kind, 2, law) - moment(kind, 1, law) ** 2


def fractional_interval_moment(beta: float, law: ClosedFormLaw) -> float:
    """<I^beta> for real beta > 0, exact closed form.

    Term-wise integration of the interval series gives
    (4 Gamma(beta+1) / pi) * (2L / (c pi))^(2 beta) * beta_D(2 beta + 1);
    integer beta routes through the exact rational moment instead (the two
    agree to rounding).
    """
    beta = float(beta)
    if not 0 < beta <= BETA_MAX:
        raise ValueError(f"beta must be in (0, {BETA_MAX}] (got {beta!r})")
    if beta.is_integer():
        return moment("interval", int(beta), law)
    return (4.0 * math.gamma(beta + 1.0) / math.pi
            * (2.0 * law.L / (law.c * math.pi)) ** (2.0 * beta)
            * dirichlet_beta(2.0 * beta + 1.0))


def tail_rates(law: ClosedFormLaw) -> TailRates:
    """Asymptotic exponential decay rates of the two laws.

    Large arguments: interval ccdf ~ exp(-(c pi / 2L)^2 I) and price-change
    ccdf ~ exp(-(pi/L) x).
    """
    return TailRates(
        interval_rate=(law.c * math.pi / (2.0 * law.L)) ** 2,
        dprice_rate=math.pi / law.L,
    )


def solve_trend_coefficient(beta: float, law: ClosedFormLaw) -> float:
    """|d| that makes the trend feedback produce tail exponent beta.

    Solves |d|^beta * <I^beta> = 1, i.e. |d| = <I^beta>^(-1/beta).
    """
    beta = float(beta)
    if not 0 < beta <= BETA_MAX:
        raise ValueError(f"beta must be in (0, {BETA_MAX}] (got {beta!r})")
    return fractional_interval_moment(beta, law) ** (-1.0 / beta)


def solve_tail_exponent(d: float, law: ClosedFormLaw,
                        bracket: tuple = (1e-6, BETA_MAX),
                        tol: float = 1e-10) -> float:
    """Tail exponent beta solving |d|^beta <I^beta> = 1 for a given d.

    Root of g(beta) = beta ln|d| + ln <I^beta>, a convex function with
    g(0) = 0; the positive root exists iff g turns negative first, i.e. for
    drifts below 1/exp(<ln I>) yet strong enough to cross back inside the
    bracket. Bracketed bisection with a secant polish.
    """
    d = float(d)
    if d == 0.0 or not math.isfinite(d):
        raise ValueError(f"d must be a nonzero finite number (got {d!r})")
    log_d = math.log(abs(d))

    def g(beta: float) -> float:
        return beta * log_d + math.log(fractional_interval_moment(beta, law))

    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0 < lo < hi <= BETA_MAX:
        raise ValueError(f"bracket must satisfy 0 < lo < hi <= {BETA_MAX} (got {bracket!r})")
    g_lo = g(lo)
    g_hi = g(hi)
    if g_lo >= 0.0:
        raise NumericsError(
            f"no tail exponent: the moment condition is already violated at beta={lo:g} "
            f"(g={g_lo:.3g}); |d|={abs(d):g} is too large"
        )
    if g_hi <= 0.0:
        raise NumericsError(
            f"no tail exponent in ({lo:g}, {hi:g}]: g({hi:g})={g_hi:.3g} < 0; "
            f"|d|={abs(d):g} is too small"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if g_mid < 0.0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
        if hi - lo <= tol * 0.25:
            break
    root = lo
    for _ in range(8):
        # secant polish inside the final bracket
        denom = g_hi - g_lo
        if denom == 0.0:
            break
        candidate = lo - g_lo * (hi - lo) / denom
        if not lo <= candidate <= hi:
            candidate = 0.5 * (lo + hi)
        g_cand = g(candidate)
        if abs(g_cand) <= 1e-15:
            return candidate
        if g_cand < 0.0:
            lo, g_lo = candidate, g_cand
        else:
            hi, g_hi = candidate, g_cand
        root = candidate
        if hi - lo <= tol * 1e-3:
            break
    return root


def puck_b_mean(d: float, law: ClosedFormLaw) -> float:
    """Mean potential coefficient implied by trend strength d: -d (L/c)^2."""
    return -float(d) * (law.L / law.c) ** 2


def diffusion_ratio(d: float, law: ClosedFormLaw) -> float:
    """Long-time price diffusion sigma(d)/sigma(0) = 2c^2 / (2c^2 - d L^2).

    Diverges as d approaches 2c^2/L^2 from below; at or past that point the
    market is in the bubble regime and the formula is meaningless.
    """
    d = float(d)
    two_c2 = 2.0 * law.c * law.c
    dL2 = d * law.L * law.L
    if dL2 >= two_c2:
        raise BubbleRegimeError(
            f"d={d:g} is in the bubble regime (d >= 2c^2/L^2 = {two_c2 / (law.L * law.L):g}); "
            "the diffusion ratio diverges"
        )
    return two_c2 / (two_c2 - dL2)


def _y_kernel(y: float, t: float, law: ClosedFormLaw) -> float:
    """Absorbing-boundary heat kernel on [0, 2L] from the center, any t."""
    L, c = law.L, law.c
    u = (c * c * t) / (L * L)
    if u >= _SWITCH_U:
        acc = 0.0
        for n_idx in range(law.series_terms):
            m = 2 * n_idx + 1
            P = m * math.pi / (2.0 * L)
            term = ((-1) ** n_idx) * math.sin(P * y) * math.exp(-c * c * P * P * t)
            acc += term
            if abs(term) <= law.tolerance * max(abs(acc), 1e-300) and n_idx >= 1:
                break
        return acc / L
    pref = 1.0 / math.sqrt(4.0 * math.pi * c * c * t)
    denom = 4.0 * c * c * t
    acc = math.exp(-((y - L) ** 2) / denom) - math.exp(-((y + L) ** 2) / denom)
    for j in range(1, law.series_terms):
        shift = 4.0 * L * j
        term = (
            math.exp(-((y - L - shift) ** 2) / denom)
            - math.exp(-((y + L - shift) ** 2) / denom)
            + math.exp(-((y - L + shift) ** 2) / denom)
            - math.exp(-((y + L + shift) ** 2) / denom)
        )
        acc += term
        if abs(term) <= law.tolerance * max(abs(acc), 1e-300):
            break
    return pref * acc


def density_u(x: float, y: float, t: float, law: ClosedFormLaw) -> float:
    """Joint pre-transaction density of mid-price displacement and spread.

    x is the displacement of the dealers' average price since the last
    transaction (diffusing freely at rate c^2/2 per unit time), y is the
    quote difference shifted to [0, 2L] (diffusing at rate c^2, absorbed at
    both walls, started at the center y = L). The joint density factorizes;
    its y-integral over [0, 2L] reproduces the interval survival function.
    """
    x = float(x)
    y = float(y)
    t = float(t)
    if not t > 0:
        raise ValueError(f"t must be positive (got {t!r})")
    if not 0 <= y <= 2.0 * law.L:
        raise ValueError(f"y must lie in [0, 2L] (got {y!r})")
    if y == 0.0 or y == 2.0 * law.L:
        return 0.0
    gauss = math.exp(-(x * x) / (law.c * law.c * t)) / (law.c * math.sqrt(math.pi * t))
    return gauss * _y_kernel(y, t, law)
