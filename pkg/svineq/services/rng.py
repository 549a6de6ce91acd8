"""
Counter-based random streams.

Bits come from numpy's Philox-4x64 keyed by (seed, stream), so any
(instance, purpose) pair can be regenerated independently of evaluation
order. Gaussians use an explicit Box-Muller transform on 53-bit uniforms
instead of numpy's samplers, which keeps the transform fixed across numpy
releases.

    u       = ((raw >> 11) + 0.5) * 2**-53          in (0, 1)
    z0, z1  = sqrt(-2 log u1) * (cos, sin)(2 pi u2)
    complex = (z0 + i z1) / sqrt(2)
"""

from __future__ import annotations

import logging
from typing import Tuple

import numpy as np

logger = logging.getLogger(__name__)

_UNIT = 2.0 ** -53
_MASK64 = (1 << 64) - 1


def stream_id(instance: int, purpose: int) -> int:
    """Stream number for one (instance, purpose) pair; purposes stay below 256."""
    if not 0 <= purpose < 256:
        raise ValueError("purpose must lie in [0, 256)")
    return ((instance << 8) | purpose) & _MASK64


class CounterStream:
    """A reproducible draw sequence for one (seed, stream) key."""

    def __init__(self, seed: int, stream: int = 0) -> None:
        if not 0 <= seed <= _MASK64 or not 0 <= stream <= _MASK64:
            raise ValueError("seed and stream must be unsigned 64-bit integers")
        self.seed = seed
        self.stream = stream
        self._bits = np.random.Philox(key=seed | (stream << 64))

    def raw(self, count: int) -> np.ndarray:
        return self._bits.random_raw(count).astype(np.uint64)

    def uniforms(self, count: int) -> np.ndarray:
        """``count`` doubles in the open interval (0, 1)."""
        raw = self.raw(count)
        return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _UNIT

    def gaussians(self, count: int) -> np.ndarray:
        """``count`` standard normals via Box-Muller."""
        pairs = (count + 1) // 2
        u = self.uniforms(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log(u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        z = np.stack((radius * np.cos(angle), radius * np.sin(angle)), axis=1).reshape(-1)
        return z[:count]

    def complex_gaussians(self, shape: Tuple[int, ...]) -> np.ndarray:
        """Standard complex normals (E|z|^2 = 1)."""
        size = int(np.prod(shape))
        z = self.gaussians(2 * size)
        return ((z[:size] + 1j * z[size:]) / np.sqrt(2.0)).reshape(shape)

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in [low, high]."""
        if high < low:
            raise ValueError("empty integer range")
        span = high - low + 1
        return low + min(int(self.uniforms(1)[0] * span), span - 1)

    def subset(self, n: int, m: int) -> Tuple[int, ...]:
        """A uniformly random m-subset of [1, n], increasing."""
        order = np.argsort(self.uniforms(n), kind="stable")
        return tuple(sorted(int(k) + 1 for k in order[:m]))
