"""Compiled hot loops for the simulation engine and window statistics.

Between two transactions the trend displacement per step (mu) and the noise
step size (c_eff * dp) are constants, so both dealer prices stay on an exact
lattice p_i = base + m*mu + step*k_i with integer coin counts k_i. The dealer
kernel tracks (k1, k2); the reduced kernel tracks the walk pair
(a, b) = (k1 - k2, k1 + k2). Both detect a transaction by the same integer
threshold (the smallest even k with k*step >= L, equivalent to comparing
|p1 - p2| against L because multiplying by a positive float is monotone) and
apply the same float expression for the price update, which is what makes the
two representations bit-identical.

The window and moving-average helpers read history straight from the output
arrays being filled, so chained segments (parameter schedules) see earlier
ticks with no extra state.

Status codes returned by the tick kernels: 0 ok, 1 positivity violation,
2 stalled tick (step budget exhausted).
"""

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_NONPOSITIVE = 1
STATUS_STALLED = 2


@njit(cache=True)
def trailing_interval_mean(intervals, end, tau):
    """Mean of the trailing intervals spanning at most tau time units.

    The newest interval (index ``end``) is always included; an older one is
    included iff the summed durations of all strictly newer intervals are
    still below tau. A single interval longer than tau is therefore its own
    window.
    """
    total = intervals[end]
    count = 1
    newer = intervals[end]
    j = end - 1
    while j >= 0 and newer < tau:
        total += intervals[j]
        count += 1
        newer += intervals[j]
        j -= 1
    return total / count


@njit(cache=True)
def weighted_ma_at(dprices, end, M):
    """Weighted moving average of the M changes ending at index ``end``.

    Weights rise linearly from the oldest (1) to the newest (M) and are
    normalized by M(M+1)/2; indices before the start of the array count as
    zero changes. Summation runs oldest-first so every caller reproduces the
    identical float result.
    """
    acc = 0.0
    for k in range(M - 1, -1, -1):
        j = end - k
        if j >= 0:
            acc += (M - k) * dprices[j]
    return acc * (2.0 / (M * (M + 1)))


@njit(cache=True)
def lattice_trigger(step_size, L):
    """Smallest even coin-count difference k with k*step_size >= L."""
    k = int(L / step_size)
    k += k & 1
    if k < 2:
        k = 2
    while k * step_size < L:
        k += 2
    while k - 2 >= 2 and (k - 2) * step_size >= L:
        k -= 2
    return k


@njit(cache=True)
def relative_interval_series(intervals, tau, out):
    """out[i] = intervals[i] / trailing mean at i (self-modulation factor)."""
    for i in range(intervals.size):
        out[i] = intervals[i] / trailing_interval_mean(intervals, i, tau)


@njit(cache=True)
def weighted_ma_series(dprices, M, out):
    """out[i] = weighted moving average of the M changes ending at i."""
    for i in range(dprices.size):
        out[i] = weighted_ma_at(dprices, i, M)


@njit(cache=True)
def run_ticks_reduced(start, stop, dt, dp, L, c, d_plus, d_minus, M,
                      self_mod, tau, clamp_lo, clamp_hi, boot_mean,
                      max_steps, last_price, t, rng,
                      out_t, out_price, out_interval, out_dprice):
    """Fill out arrays [start:stop) evolving the reduced walk (a, b)."""
    s0 = rng[0]
    s1 = rng[1]
    s2 = rng[2]
    s3 = rng[3]
    buf = rng[4]
    left = rng[5]
    status = STATUS_OK
    bad_tick = -1
    bad_price = 0.0
    for idx in range(start, stop):
        wma = weighted_ma_at(out_dprice, idx - 1, M)
        d_eff = d_plus if wma >= 0.0 else d_minus
        mu = (d_eff * wma) * dt
        if self_mod:
            if idx == 0:
                iv_mean = boot_mean
            else:
                iv_mean = trailing_interval_mean(out_interval, idx - 1, tau)
            if iv_mean < clamp_lo:
                iv_mean = clamp_lo
            elif iv_mean > clamp_hi:
                iv_mean = clamp_hi
            c_eff = math.sqrt(((L * L) * 0.5) / iv_mean)
        else:
            c_eff = c
        step_size = c_eff * dp
        trigger = lattice_trigger(step_size, L)
        a = 0
        b = 0
        m = 0
        stalled = False
        while True:
            if left == np.uint64(0):
                out = s0 + s3
                out = ((out << np.uint64(23)) | (out >> np.uint64(41))) + s0
                tw = s1 << np.uint64(17)
                s2 = s2 ^ s0
                s3 = s3 ^ s1
                s1 = s1 ^ s2
                s0 = s0 ^ s3
                s2 = s2 ^ tw
                s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
                buf = out
                left = np.uint64(64)
            f1 = 1 if buf & np.uint64(1) == np.uint64(1) else -1
            buf = buf >> np.uint64(1)
            left = left - np.uint64(1)
            if left == np.uint64(0):
                out = s0 + s3
                out = ((out << np.uint64(23)) | (out >> np.uint64(41))) + s0
                tw = s1 << np.uint64(17)
                s2 = s2 ^ s0
                s3 = s3 ^ s1
                s1 = s1 ^ s2
                s0 = s0 ^ s3
                s2 = s2 ^ tw
                s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
                buf = out
                left = np.uint64(64)
            f2 = 1 if buf & np.uint64(1) == np.uint64(1) else -1
            buf = buf >> np.uint64(1)
            left = left - np.uint64(1)
            a += f1 - f2
            b += f1 + f2
            m += 1
            if a >= trigger or -a >= trigger:
                break
            if m >= max_steps:
                stalled = True
                break
        if stalled:
            status = STATUS_STALLED
            bad_tick = idx
            break
        dg = m * mu + 0.5 * (step_size * b)
        price = last_price + dg
        if price <= 0.0:
            status = STATUS_NONPOSITIVE
            bad_tick = idx
            bad_price = price
            break
        dpr = price - last_price
        interval = m * dt
        t = t + interval
        out_t[idx] = t
        out_price[idx] = price
        out_interval[idx] = interval
        out_dprice[idx] = dpr
        last_price = price
    rng[0] = s0
    rng[1] = s1
    rng[2] = s2
    rng[3] = s3
    rng[4] = buf
    rng[5] = left
    return status, bad_tick, bad_price, last_price, t


@njit(cache=True)
def run_ticks_dealer(start, stop, dt, dp, L, c, d_plus, d_minus, M,
                     self_mod, tau, clamp_lo, clamp_hi, boot_mean,
                     max_steps, last_price, t, rng,
                     out_t, out_price, out_interval, out_dprice):
    """Fill out arrays [start:stop) evolving per-dealer coin counts."""
    s0 = rng[0]
    s1 = rng[1]
    s2 = rng[2]
    s3 = rng[3]
    buf = rng[4]
    left = rng[5]
    status = STATUS_OK
    bad_tick = -1
    bad_price = 0.0
    for idx in range(start, stop):
        wma = weighted_ma_at(out_dprice, idx - 1, M)
        d_eff = d_plus if wma >= 0.0 else d_minus
        mu = (d_eff * wma) * dt
        if self_mod:
            if idx == 0:
                iv_mean = boot_mean
            else:
                iv_mean = trailing_interval_mean(out_interval, idx - 1, tau)
            if iv_mean < clamp_lo:
                iv_mean = clamp_lo
            elif iv_mean > clamp_hi:
                iv_mean = clamp_hi
            c_eff = math.sqrt(((L * L) * 0.5) / iv_mean)
        else:
            c_eff = c
        step_size = c_eff * dp
        trigger = lattice_trigger(step_size, L)
        k1 = 0
        k2 = 0
        m = 0
        stalled = False
        while True:
            if left == np.uint64(0):
                out = s0 + s3
                out = ((out << np.uint64(23)) | (out >> np.uint64(41))) + s0
                tw = s1 << np.uint64(17)
                s2 = s2 ^ s0
                s3 = s3 ^ s1
                s1 = s1 ^ s2
                s0 = s0 ^ s3
                s2 = s2 ^ tw
                s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
                buf = out
                left = np.uint64(64)
            f1 = 1 if buf & np.uint64(1) == np.uint64(1) else -1
            buf = buf >> np.uint64(1)
            left = left - np.uint64(1)
            if left == np.uint64(0):
                out = s0 + s3
                out = ((out << np.uint64(23)) | (out >> np.uint64(41))) + s0
                tw = s1 << np.uint64(17)
                s2 = s2 ^ s0
                s3 = s3 ^ s1
                s1 = s1 ^ s2
                s0 = s0 ^ s3
                s2 = s2 ^ tw
                s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
                buf = out
                left = np.uint64(64)
            f2 = 1 if buf & np.uint64(1) == np.uint64(1) else -1
            buf = buf >> np.uint64(1)
            left = left - np.uint64(1)
            k1 += f1
            k2 += f2
            m += 1
            dk = k1 - k2
            if dk >= trigger or -dk >= trigger:
                break
            if m >= max_steps:
                stalled = True
                break
        if stalled:
            status = STATUS_STALLED
            bad_tick = idx
            break
        dg = m * mu + 0.5 * (step_size * (k1 + k2))
        price = last_price + dg
        if price <= 0.0:
            status = STATUS_NONPOSITIVE
            bad_tick = idx
            bad_price = price
            break
        dpr = price - last_price
        interval = m * dt
        t = t + interval
        out_t[idx] = t
        out_price[idx] = price
        out_interval[idx] = interval
        out_dprice[idx] = dpr
        last_price = price
    rng[0] = s0
    rng[1] = s1
    rng[2] = s2
    rng[3] = s3
    rng[4] = buf
    rng[5] = left
    return status, bad_tick, bad_price, last_price, t
