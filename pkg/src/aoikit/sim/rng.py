"""Counter-based uniform/exponential variates.

A stream is a 64-bit key; draw ``k`` of a stream is ``mix64(key + (k+1) * GAMMA)``
(the SplitMix64 output function), so any draw can be regenerated from
``(key, k)`` alone and streams never share mutable state.
"""
import numpy as np
from numba import njit, uint64

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def uniform(key, counter):
    """Uniform double in the open interval (0, 1)."""
    z = mix64(uint64(key) + (uint64(counter) + _ONE) * GAMMA)
    return (float(z >> _S11) + 0.5) * _INV53


@njit(cache=True, inline="always")
def exponential(key, counter, rate):
    return -np.log(uniform(key, counter)) / rate


def stream_key(seed: int, replication: int, stream: int) -> np.uint64:
    """Independent 64-bit key for a (seed, replication, stream) triple."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=(int(replication), int(stream)))
    return ss.generate_state(1, dtype=np.uint64)[0]


SERVICE_STREAM = 0


def source_stream(i: int) -> int:
    return i + 1
