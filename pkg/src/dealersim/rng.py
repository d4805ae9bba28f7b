"""Deterministic coin-flip stream shared by all simulation code paths.

The generator is xoshiro256++ with its state expanded from the user seed by
splitmix64 (both published reference algorithms). Flips are consumed from
each 64-bit word starting at the least significant bit, bit value 1 meaning
+1 and 0 meaning -1, exactly one bit per flip. Every step of the simulation
draws two flips in a fixed order: dealer 1 first, dealer 2 second.

Two implementations produce the same stream on purpose: numba kernels work
on a raw uint64 state vector (layout below), and the pure-Python BitStream
mirrors the arithmetic with masked ints for the step-by-step reference path.
Tests assert word-for-word equality between the two.

State vector layout (uint64[6]):
    [0..3] xoshiro256++ state, [4] current bit buffer, [5] bits left in it.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATE_SIZE = 6

_MASK64 = 0xFFFFFFFFFFFFFFFF
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


@njit(cache=True)
def seed_state(seed, state):
    """Fill a uint64[6] state vector deterministically from a 64-bit seed."""
    z = seed
    for i in range(4):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        w = z
        w = (w ^ (w >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        w = (w ^ (w >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        w = w ^ (w >> np.uint64(31))
        state[i] = w
    if state[0] | state[1] | state[2] | state[3] == np.uint64(0):
        # all-zero xoshiro state is a fixed point; unreachable in practice
        state[0] = np.uint64(0x9E3779B97F4A7C15)
    state[4] = np.uint64(0)
    state[5] = np.uint64(0)


@njit(cache=True)
def next_word(state):
    """Advance xoshiro256++ and return the next 64-bit output word."""
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    out = s0 + s3
    out = ((out << np.uint64(23)) | (out >> np.uint64(41))) + s0
    t = s1 << np.uint64(17)
    s2 = s2 ^ s0
    s3 = s3 ^ s1
    s1 = s1 ^ s2
    s0 = s0 ^ s3
    s2 = s2 ^ t
    s3 = (s3 << np.uint64(45)) | (s3 >> np.uint64(19))
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return out


@njit(cache=True)
def next_flip(state):
    """Return the next coin flip as +1 or -1 (LSB-first within each word)."""
    if state[5] == np.uint64(0):
        state[4] = next_word(state)
        state[5] = np.uint64(64)
    flip = 1 if state[4] & np.uint64(1) == np.uint64(1) else -1
    state[4] = state[4] >> np.uint64(1)
    state[5] = state[5] - np.uint64(1)
    return flip


def new_state_vector(seed: int) -> np.ndarray:
    """Build a fresh kernel state vector from any Python int seed."""
    state = np.zeros(STATE_SIZE, dtype=np.uint64)
    seed_state(np.uint64(int(seed) & _MASK64), state)
    return state


class BitStream:
    """Pure-Python twin of the kernel generator, same words and flips."""

    __slots__ = ("_s", "_buf", "_left")

    def __init__(self, seed: int):
        z = int(seed) & _MASK64
        s = []
        for _ in range(4):
            z = (z + _SPLITMIX_GAMMA) & _MASK64
            w = z
            w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & _MASK64
            w = w ^ (w >> 31)
            s.append(w)
        if not any(s):
            s[0] = _SPLITMIX_GAMMA
        self._s = s
        self._buf = 0
        self._left = 0

    def next_word(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (s0 + s3) & _MASK64
        out = ((((out << 23) & _MASK64) | (out >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) & _MASK64) | (s3 >> 19)
        self._s = [s0, s1, s2, s3]
        return out

    def next_flip(self) -> int:
        if self._left == 0:
            self._buf = self.next_word()
            self._left = 64
        flip = 1 if self._buf & 1 else -1
        self._buf >>= 1
        self._left -= 1
        return flip

    def state_vector(self) -> np.ndarray:
        """Export the current state in the kernel layout."""
        vec = np.zeros(STATE_SIZE, dtype=np.uint64)
        for i in range(4):
            vec[i] = self._s[i]
        vec[4] = self._buf
        vec[5] = self._left
        return vec

    @classmethod
    def from_state_vector(cls, vec) -> "BitStream":
        stream = cls.__new__(cls)
        stream._s = [int(vec[i]) for i in range(4)]
        stream._buf = int(vec[4])
        stream._left = int(vec[5])
        return stream
