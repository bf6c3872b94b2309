"""Seeded, stream-splittable random numbers.

All randomness flows through :class:`Rng`, a thin wrapper around numpy's
counter-based Philox4x64-10 bit generator.  A generator is identified by a
base seed plus a tuple of stream ids, so per-trial and per-restart
generators can be rebuilt in isolation from the numbers published in a
report.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadRange

ALGORITHM_ID = "philox4x64-10/numpy-seedsequence"


class Rng:
    algorithm_id = ALGORITHM_ID

    def __init__(self, seed: int, stream: tuple[int, ...] = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise BadRange(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream = tuple(int(s) for s in stream)
        seq = np.random.SeedSequence(seed, spawn_key=self.stream)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def child(self, *ids: int) -> "Rng":
        """Independent generator for sub-stream ``ids`` (does not consume state)."""
        return Rng(self.seed, self.stream + tuple(ids))

    def random(self, size=None):
        return self._gen.random(size)

    def integers(self, lo, hi, size=None):
        return self._gen.integers(lo, hi, size=size)

    def __repr__(self):
        return f"Rng(seed={self.seed}, stream={self.stream})"


def derive_seed(base: int, *ids: int) -> int:
    """Deterministic 63-bit seed for the sub-task ``ids`` of ``base``."""
    words = np.random.SeedSequence(int(base), spawn_key=tuple(int(i) for i in ids)).generate_state(2, np.uint32)
    return (int(words[0]) << 31) ^ int(words[1])


def uniform(rng: Rng, lo: float = 0.0, hi: float = 1.0, size=None):
    if not lo < hi:
        raise BadRange(f"empty interval [{lo}, {hi})")
    x = lo + (hi - lo) * rng.random(size)
    # rounding can land exactly on hi
    return np.minimum(x, np.nextafter(hi, lo))


def standard_normal(rng: Rng, size=None):
    """Standard normal draws via the Box-Muller transform.

    Uniforms are consumed in pairs; an odd ``size`` discards the last sine
    branch so the stream position depends only on ``ceil(size / 2)``.
    """
    count = 1 if size is None else int(np.prod(size))
    pairs = (count + 1) // 2
    u = rng.random((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * math.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(theta)
    z[:, 1] = radius * np.sin(theta)
    z = z.ravel()[:count]
    if size is None:
        return float(z[0])
    return z.reshape(size)


def random_permutation(rng: Rng, m: int) -> np.ndarray:
    """Uniform random permutation of ``0..m-1`` (Fisher-Yates)."""
    if m < 1:
        raise BadRange("permutation size must be at least 1")
    return rng._gen.permutation(m).astype(np.int64)


def sample_batch(rng: Rng, n: int, p: int, batch: int):
    """``batch`` (row, column) index pairs drawn uniformly with replacement."""
    if batch < 1:
        raise BadRange("batch size must be at least 1")
    flat = rng.integers(0, n * p, size=batch)
    return flat // p, flat % p


class EpochSampler:
    """Without-replacement alternative: walk a fresh shuffle of the grid each epoch."""

    def __init__(self, rng: Rng, n: int, p: int):
        self.rng, self.n, self.p = rng, n, p
        self._order = np.empty(0, dtype=np.int64)
        self._pos = 0

    def __call__(self, batch: int):
        out = []
        need = batch
        while need:
            if self._pos == self._order.size:
                self._order = random_permutation(self.rng, self.n * self.p)
                self._pos = 0
            take = min(need, self._order.size - self._pos)
            out.append(self._order[self._pos:self._pos + take])
            self._pos += take
            need -= take
        flat = np.concatenate(out)
        return flat // self.p, flat % self.p
