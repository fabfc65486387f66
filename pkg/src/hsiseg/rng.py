"""Counter-based pseudo-random numbers for reproducible scene synthesis.

Every draw is a pure function of (seed, stream, counter), so values are
independent of evaluation order and identical across platforms and numpy
versions. The mixer is SplitMix64 (Steele et al. constants).
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# float in [0,1) from the top 53 bits of a u64
_INV_2_53 = float(2.0**-53)


def _mix(x: np.ndarray) -> np.ndarray:
    # array ops so u64 wrap-around stays silent (numpy warns on scalars)
    x = np.add(x, _GAMMA, dtype=np.uint64)
    x ^= x >> np.uint64(30)
    x = np.multiply(x, _MIX1, dtype=np.uint64)
    x ^= x >> np.uint64(27)
    x = np.multiply(x, _MIX2, dtype=np.uint64)
    x ^= x >> np.uint64(31)
    return x


def random_u64(seed: int, stream: int, counters) -> np.ndarray:
    """Vector of u64 words, one per counter, from stream `stream` of `seed`."""
    c = np.asarray(counters, dtype=np.uint64)
    key = np.array(((seed & 0xFFFFFFFFFFFFFFFF) + stream) & 0xFFFFFFFFFFFFFFFF, dtype=np.uint64)
    base = _mix(_mix(key))
    return _mix(np.add(base, c, dtype=np.uint64))


def random_uniform(seed: int, stream: int, counters) -> np.ndarray:
    """Uniform floats in [0, 1), one per counter."""
    bits = random_u64(seed, stream, counters) >> np.uint64(11)
    return bits.astype(np.float64) * _INV_2_53


def random_normal(seed: int, stream: int, counters) -> np.ndarray:
    """Standard normal draws, one per counter, via Box-Muller.

    Each counter consumes two u64 words taken from sub-counters 2i and 2i+1,
    so disjoint counter ranges never share underlying words.
    """
    c = np.asarray(counters, dtype=np.uint64)
    u1 = random_uniform(seed, stream, c * np.uint64(2))
    u2 = random_uniform(seed, stream, c * np.uint64(2) + np.uint64(1))
    # u1 = 0 would send log to -inf; shift into (0, 1]
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    return r * np.cos(2.0 * np.pi * u2)
