"""Deterministic random streams.

Every random decision in a run flows from one integer seed through named
sub-streams, so each phase can be re-run in isolation and still reproduce
the same output.

The generator is SplitMix64 (version 1 of this module's stream layout).
It plugs into :class:`random.Random`, so ``choice``, ``sample``,
``shuffle`` and friends come from the standard library unchanged.
"""

from __future__ import annotations

import random

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
STREAM_VERSION = 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


def derive_seed(seed: int, name: str) -> int:
    """Seed of the sub-stream ``name`` below ``seed``."""
    return mix64((seed & MASK64) ^ fnv1a64(name) ^ (STREAM_VERSION * GOLDEN))


class SplitMix64(random.Random):
    """SplitMix64 behind the :class:`random.Random` interface."""

    def __init__(self, seed: int = 0):
        self._state = 0
        super().__init__(seed)

    def seed(self, a=0, version=2):  # noqa: D102 - random.Random API
        self._state = int(a) & MASK64
        self.gauss_next = None

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def getrandbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        out, filled = 0, 0
        while filled < k:
            out |= self.next_u64() << filled
            filled += 64
        return out & ((1 << k) - 1)

    def getstate(self):
        return (STREAM_VERSION, self._state, self.gauss_next)

    def setstate(self, state):
        version, self._state, self.gauss_next = state
        if version != STREAM_VERSION:
            raise ValueError(f"unsupported rng state version {version}")

    def spawn(self, name: str) -> "SplitMix64":
        """Independent child stream keyed on the current state and ``name``."""
        return SplitMix64(derive_seed(self._state, name))


def stream(seed: int, name: str) -> SplitMix64:
    return SplitMix64(derive_seed(seed, name))


def hash_grid(seed: int, *coords: np.ndarray) -> np.ndarray:
    """Vectorized integer hash of lattice coordinates, uniform in [0, 1)."""
    with np.errstate(over="ignore"):
        h = np.full(np.broadcast(*coords).shape, mix64(seed), dtype=np.uint64)
        for i, c in enumerate(coords):
            c = np.asarray(c).astype(np.int64).astype(np.uint64)
            h = h ^ (c * np.uint64(mix64(i + 1) | 1))
            h = h + np.uint64(GOLDEN)
            h = (h ^ (h >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            h = (h ^ (h >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            h = h ^ (h >> np.uint64(31))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
