"""Counter-based random streams.

Every path gets its own SplitMix64 stream keyed by
``mix(base_seed, path_index)``; draw ``k`` of that stream is a pure function
of (base_seed, path_index, k).  Paths can therefore be simulated in any
order or split across workers and still reproduce bit for bit.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def mix64(z):
    """SplitMix64 finalizer applied elementwise to uint64 values."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def path_keys(base_seed: int, path_indices) -> np.ndarray:
    base = np.uint64(int(base_seed) & _MASK64)
    idx = np.asarray(path_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(mix64(base + _GOLDEN) ^ (idx + _GOLDEN))


def uniforms(base_seed: int, path_indices, n_steps: int, offset: int = 0) -> np.ndarray:
    """Uniform [0, 1) draws of shape ``(len(path_indices), n_steps)``.

    Column ``k`` holds draw ``offset + k`` of each path's stream.
    """
    keys = path_keys(base_seed, path_indices)[:, None]
    ctr = np.arange(offset + 1, offset + n_steps + 1, dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        bits = mix64(keys + ctr * _GOLDEN)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def generator(base_seed: int, path_index: int = 0) -> np.random.Generator:
    """A numpy Generator seeded from the same (base_seed, path_index) mix."""
    key = int(path_keys(base_seed, [path_index])[0])
    return np.random.default_rng(key)
