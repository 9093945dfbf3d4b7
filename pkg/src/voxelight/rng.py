"""Counter-based random streams.

Each render sample owns an independent splitmix64 stream keyed by
(seed, pixel_index, sample_index[, channel]), so output is bit-identical
no matter how pixels are scheduled across workers.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(33))) * np.uint64(0xFF51AFD7ED558CCD)
    z = (z ^ (z >> np.uint64(33))) * np.uint64(0xC4CEB9FE1A85EC53)
    return z ^ (z >> np.uint64(33))


@njit(cache=True)
def stream_state(seed, k1, k2, k3):
    """Initial state for the stream keyed by (seed, k1, k2, k3)."""
    s = _mix(np.uint64(seed) + _GOLDEN)
    s = _mix(s ^ (np.uint64(k1) + _GOLDEN))
    s = _mix(s ^ (np.uint64(k2) + _GOLDEN))
    s = _mix(s ^ (np.uint64(k3) + _GOLDEN))
    return s


@njit(cache=True, inline="always")
def next_u64(state):
    """Advance the 1-element uint64 state array, return next raw draw."""
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def next_float(state):
    """Uniform draw in [0, 1) with 53-bit resolution."""
    return (next_u64(state) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


class RngStream:
    """Python-side view of one counter-based stream."""

    def __init__(self, seed: int, k1: int = 0, k2: int = 0, k3: int = 0):
        self._state = np.empty(1, dtype=np.uint64)
        self._state[0] = stream_state(seed, k1, k2, k3)

    @property
    def state(self) -> np.ndarray:
        return self._state

    def uniform(self) -> float:
        return float(next_float(self._state))
