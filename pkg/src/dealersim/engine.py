"""Two-dealer market simulation engine.

Two dealers quote mid-prices p1, p2. Every dt both move by an independent
coin flip of size c_eff*dp plus a common trend displacement; when the quotes
differ by at least the spread L they trade at the midpoint, both reset to
the traded price, and one tick (TickRecord) is emitted.

Three code paths produce bit-identical output for equal (params, seed): the
compiled dealer and reduced-walk kernels (see _kernels) used by run(), and
the pure-Python step() loop kept as a readable reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import math

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError, PositivityError, StalledError
from .params import SimParams
from .rng import BitStream, new_state_vector

_CSV_HEADER = "n,t,price,interval,dprice"


@dataclass(frozen=True)
class TickRecord:
    """One transaction: counter, wall time, price, interval, price change."""

    n: int
    t: float
    price: float
    interval: float
    dprice: float


class TickSeries:
    """Immutable per-transaction output of a run.

    Attributes t, price, interval, dprice are aligned float arrays; n is the
    1-based tick counter. p0 is the pre-run price, so
    price[0] = p0 + dprice[0].
    """

    __slots__ = ("t", "price", "interval", "dprice", "p0")

    def __init__(self, t, price, interval, dprice, p0: float):
        arrays = []
        for values in (t, price, interval, dprice):
            arr = np.ascontiguousarray(values, dtype=np.float64)
            arr.flags.writeable = False
            arrays.append(arr)
        if len({arr.shape for arr in arrays}) != 1 or arrays[0].ndim != 1:
            raise DataError("tick columns must be equal-length 1-D arrays")
        self.t, self.price, self.interval, self.dprice = arrays
        self.p0 = float(p0)

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self) + 1, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.t.shape[0])

    def record(self, i: int) -> TickRecord:
        idx = int(i)
        if idx < 0:
            idx += len(self)
        if not 0 <= idx < len(self):
            raise IndexError(i)
        return TickRecord(idx + 1, float(self.t[idx]), float(self.price[idx]),
                          float(self.interval[idx]), float(self.dprice[idx]))

    def __iter__(self) -> Iterable[TickRecord]:
        return (self.record(i) for i in range(len(self)))

    def to_csv(self, path) -> None:
        """Write the series with full float precision and LF endings."""
        with open(path, "w", newline="\n") as fh:
            fh.write(_CSV_HEADER + "\n")
            for i in range(len(self)):
                fh.write(
                    f"{i + 1},{self.t[i]:.17g},{self.price[i]:.17g},"
                    f"{self.interval[i]:.17g},{self.dprice[i]:.17g}\n"
                )

    @classmethod
    def from_csv(cls, path) -> "TickSeries":
        with open(path, "r", newline="") as fh:
            header = fh.readline().strip()
            if header != _CSV_HEADER:
                raise DataError(f"unexpected tick CSV header {header!r}")
            body = fh.read()
        if not body.strip():
            empty = np.empty(0)
            return cls(empty, empty, empty, empty, float("nan"))
        rows = np.loadtxt(body.splitlines(), delimiter=",", dtype=np.float64, ndmin=2)
        if rows.shape[1] != 5:
            raise DataError(f"expected 5 columns, got {rows.shape[1]}")
        t, price, interval, dprice = rows[:, 1], rows[:, 2], rows[:, 3], rows[:, 4]
        p0 = float(price[0] - dprice[0])
        return cls(t, price, interval, dprice, p0)


def _as_interval_values(interval_history) -> np.ndarray:
    """Accept plain interval floats or (tick, interval) pairs."""
    values = list(interval_history)
    if values and isinstance(values[0], (tuple, list)):
        values = [pair[1] for pair in values]
    return np.asarray(values, dtype=np.float64)


def weighted_ma(dp_history: Sequence[float]) -> float:
    """Linearly weighted average of the last M price changes, oldest first.

    The newest change gets weight M, the oldest weight 1, normalized to sum
    to one. Histories shorter than intended must be zero-padded by the
    caller (new simulations start from all zeros).
    """
    M = len(dp_history)
    if M < 1:
        raise ConfigError("dp_history must hold at least one value")
    acc = 0.0
    for i, value in enumerate(dp_history):
        acc += (i + 1) * float(value)
    return acc * (2.0 / (M * (M + 1)))


def modulated_c(interval_history, tau, L, clamp_lo, clamp_hi,
                bootstrap: float | None = None) -> float:
    """Self-modulated noise amplitude from the trailing interval window.

    The window mean spans at most tau time units of the most recent
    intervals (a single interval longer than tau stands alone), is clamped
    to [clamp_lo, clamp_hi], and sets the amplitude so the expected interval
    reproduces it: c = sqrt((L^2/2)/mean). With no recorded intervals the
    mean falls back to ``bootstrap`` (default sqrt(clamp_lo*clamp_hi)).
    """
    if not tau > 0:
        raise ConfigError(f"tau must be positive (got {tau!r})")
    if not L > 0:
        raise ConfigError(f"L must be positive (got {L!r})")
    if not 0 < clamp_lo < clamp_hi:
        raise ConfigError(
            f"clamps must satisfy 0 < clamp_lo < clamp_hi (got {clamp_lo!r}, {clamp_hi!r})"
        )
    values = _as_interval_values(interval_history)
    if values.size == 0:
        mean = math.sqrt(clamp_lo * clamp_hi) if bootstrap is None else float(bootstrap)
    else:
        mean = float(_kernels.trailing_interval_mean(values, values.size - 1, float(tau)))
    if mean < clamp_lo:
        mean = clamp_lo
    elif mean > clamp_hi:
        mean = clamp_hi
    return math.sqrt(((L * L) * 0.5) / mean)


def trailing_interval_mean(intervals, tau) -> float:
    """Window mean used by the self-modulation rule (shared definition)."""
    values = _as_interval_values(intervals)
    if values.size == 0:
        raise DataError("need at least one interval")
    if not tau > 0:
        raise ConfigError(f"tau must be positive (got {tau!r})")
    return float(_kernels.trailing_interval_mean(values, values.size - 1, float(tau)))


@dataclass
class SimState:
    """Live state of the step-by-step reference engine.

    Between transactions both dealer prices sit on an exact lattice
    p_i = base_i + m*mu + step_size*k_i; bases are equal from construction
    and after every transaction, so the transaction test is an integer
    comparison against ``trigger``. Hand-built states with unequal bases are
    supported through a direct float comparison.
    """

    params: SimParams
    bits: BitStream
    base1: float
    base2: float
    k1: int
    k2: int
    m: int
    n: int
    t: float
    last_transaction_t: float
    last_price: float
    dp_history: list
    interval_history: list
    c_eff: float = 0.0
    mu: float = 0.0
    step_size: float = 0.0
    trigger: int = 2

    @property
    def p1(self) -> float:
        return self.base1 + self.m * self.mu + self.step_size * self.k1

    @property
    def p2(self) -> float:
        return self.base2 + self.m * self.mu + self.step_size * self.k2

    def interval_values(self) -> list:
        return [pair[1] for pair in self.interval_history]


def _refresh_segment(state: SimState) -> None:
    """Recompute the constants that hold until the next transaction."""
    p = state.params
    wma = weighted_ma(state.dp_history)
    d_eff = p.effective_d_plus if wma >= 0.0 else p.effective_d_minus
    state.mu = (d_eff * wma) * p.dt
    if p.self_modulation:
        state.c_eff = modulated_c(state.interval_values(), p.tau, p.L,
                                  p.clamp_lo, p.clamp_hi,
                                  bootstrap=p.bootstrap_interval)
    else:
        state.c_eff = p.c
    state.step_size = state.c_eff * p.dp
    state.trigger = int(_kernels.lattice_trigger(state.step_size, p.L))


def _prune_interval_history(state: SimState) -> None:
    # keep exactly the intervals the tau window can still include
    history = state.interval_history
    newer = 0.0
    keep = 0
    for i in range(len(history) - 1, -1, -1):
        keep += 1
        newer += history[i][1]
        if newer >= state.params.tau:
            break
    if keep < len(history):
        del history[: len(history) - keep]


def new_simulation(params: SimParams) -> SimState:
    """Fresh state: both dealers at p0, zeroed histories, seeded stream."""
    if not isinstance(params, SimParams):
        raise ConfigError("params must be a SimParams instance")
    state = SimState(
        params=params,
        bits=BitStream(params.seed),
        base1=params.p0,
        base2=params.p0,
        k1=0,
        k2=0,
        m=0,
        n=0,
        t=0.0,
        last_transaction_t=0.0,
        last_price=params.p0,
        dp_history=[0.0] * params.M,
        interval_history=[],
    )
    _refresh_segment(state)
    return state


def step(state: SimState, params: SimParams | None = None) -> TickRecord | None:
    """Advance one dt: move both dealers, emit a TickRecord on transaction.

    ``params`` defaults to the state's own; passing a different object swaps
    the configuration mid-run (histories and the random stream carry over).
    """
    if params is not None and params is not state.params:
        if state.m != 0:
            raise ConfigError("switch parameters only right after a transaction")
        state.params = params
        _refresh_segment(state)
    p = state.params
    f1 = state.bits.next_flip()
    f2 = state.bits.next_flip()
    state.k1 += f1
    state.k2 += f2
    state.m += 1
    state.t = state.last_transaction_t + state.m * p.dt
    if state.base1 == state.base2:
        dk = state.k1 - state.k2
        hit = dk >= state.trigger or -dk >= state.trigger
    else:
        hit = abs(state.p1 - state.p2) >= p.L
    if not hit:
        if state.m >= p.max_steps_per_tick:
            raise StalledError(state.n + 1, p.max_steps_per_tick)
        return None
    if state.base1 == state.base2:
        dg = state.m * state.mu + 0.5 * (state.step_size * (state.k1 + state.k2))
        price = state.last_price + dg
    else:
        price = 0.5 * (state.p1 + state.p2)
    if price <= 0.0:
        raise PositivityError(state.n + 1, price)
    dpr = price - state.last_price
    interval = state.m * p.dt
    state.n += 1
    t = state.last_transaction_t + interval
    record = TickRecord(state.n, t, price, interval, dpr)
    state.t = t
    state.last_transaction_t = t
    state.last_price = price
    state.base1 = price
    state.base2 = price
    state.k1 = 0
    state.k2 = 0
    state.m = 0
    state.dp_history = state.dp_history[1:] + [dpr]
    state.interval_history.append((state.n, interval))
    _prune_interval_history(state)
    _refresh_segment(state)
    return record


_REPRESENTATIONS = ("reduced", "dealer")


def run(params: SimParams, representation: str = "reduced") -> TickSeries:
    """Simulate params.n_ticks transactions with the compiled kernels."""
    return run_schedule([params], representation)


def run_schedule(segments: Sequence[SimParams],
                 representation: str = "reduced") -> TickSeries:
    """Run consecutive parameter segments over one continuous state.

    Price, wall time, histories, and the random stream carry across segment
    boundaries; the seed (and p0) come from the first segment. All segments
    must agree on L, c, dp, dt, and p0 so the spliced series stays a single
    market.
    """
    if representation not in _REPRESENTATIONS:
        raise ConfigError(
            f"representation must be one of {_REPRESENTATIONS} (got {representation!r})"
        )
    segments = list(segments)
    if not segments:
        raise ConfigError("schedule needs at least one segment")
    for seg in segments:
        if not isinstance(seg, SimParams):
            raise ConfigError("every segment must be a SimParams instance")
    base = segments[0]
    for seg in segments[1:]:
        for name in ("L", "c", "dp", "dt", "p0"):
            if getattr(seg, name) != getattr(base, name):
                raise ConfigError(f"segments disagree on {name}")
    total = sum(seg.n_ticks for seg in segments)
    out_t = np.empty(total)
    out_price = np.empty(total)
    out_interval = np.empty(total)
    out_dprice = np.empty(total)
    rng = new_state_vector(base.seed)
    kernel = (_kernels.run_ticks_reduced if representation == "reduced"
              else _kernels.run_ticks_dealer)
    last_price = base.p0
    t = 0.0
    start = 0
    for seg in segments:
        stop = start + seg.n_ticks
        status, bad_tick, bad_price, last_price, t = kernel(
            start, stop, seg.dt, seg.dp, seg.L, seg.c,
            seg.effective_d_plus, seg.effective_d_minus, seg.M,
            seg.self_modulation, seg.tau, seg.clamp_lo, seg.clamp_hi,
            seg.bootstrap_interval, seg.max_steps_per_tick,
            last_price, t, rng, out_t, out_price, out_interval, out_dprice,
        )
        if status == _kernels.STATUS_NONPOSITIVE:
            raise PositivityError(bad_tick + 1, bad_price)
        if status == _kernels.STATUS_STALLED:
            raise StalledError(bad_tick + 1, seg.max_steps_per_tick)
        start = stop
    return TickSeries(out_t, out_price, out_interval, out_dprice, base.p0)
