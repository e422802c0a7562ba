"""Counter-based pseudorandom draws built on the SplitMix64 output function.

Every draw is a pure function of ``(seed, stream, counter)``:

    key     = mix64(mix64(seed) ^ stream)
    draw(n) = mix64(key + (n + 1) * GOLDEN)

``stream`` selects an independent sequence (one per Monte Carlo trial, one per
toy function, ...) and ``counter`` indexes into it.  Because nothing is carried
between draws, trials can be evaluated in any order, or concurrently, and still
produce the same numbers.  The scalar, numpy and numba versions below agree
bit for bit.
"""
from __future__ import annotations

import numba
import numpy as np

MASK64 = 0xFFFF_FFFF_FFFF_FFFF
GOLDEN = 0x9E37_79B9_7F4A_7C15
_M1 = 0xBF58_476D_1CE4_E5B9
_M2 = 0x94D0_49BB_1331_11EB
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    return mix64(mix64(seed & MASK64) ^ (stream & MASK64))


def draw(key: int, counter: int) -> int:
    return mix64(key + (counter + 1) * GOLDEN)


def uniform(key: int, counter: int) -> float:
    """Uniform double in [0, 1) from the top 53 bits of a draw."""
    return (draw(key, counter) >> 11) * _INV53


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def draw_array(key: int, counters: np.ndarray) -> np.ndarray:
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(key) + (c + np.uint64(1)) * np.uint64(GOLDEN)
    return mix64_array(z)


@numba.njit(cache=True)
def _mix64_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@numba.njit(cache=True)
def _uniform_nb(key, counter):
    z = key + (np.uint64(counter) + np.uint64(1)) * np.uint64(GOLDEN)
    return np.float64(_mix64_nb(z) >> np.uint64(11)) * _INV53
