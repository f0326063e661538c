"""Named, counter-based random streams.

Every stochastic operation in the package draws from an explicit
``RngStream`` addressed by (seed, name). Streams are backed by Philox,
a counter-based generator, so the same (seed, name) always yields the
same sequence regardless of what other streams were consumed. Child
streams derive their key from the parent's name path, which makes
per-sample / per-stage randomness reproducible and order-independent.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_from(seed: int, name: str) -> int:
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


class RngStream:
    """A seedable stream identified by (seed, name)."""

    def __init__(self, seed: int, name: str = "root"):
        self.seed = int(seed)
        self.name = name
        self._gen = np.random.Generator(np.random.Philox(key=_key_from(self.seed, name)))

    def child(self, name: str) -> "RngStream":
        """Derive an independent stream at ``<parent name>/<name>``."""
        return RngStream(self.seed, f"{self.name}/{name}")

    # -- draws ---------------------------------------------------------

    def normal(self, shape=(), dtype=np.float32) -> np.ndarray:
        return self._gen.standard_normal(size=shape).astype(dtype, copy=False)

    def uniform(self, low=0.0, high=1.0, shape=(), dtype=np.float32) -> np.ndarray:
        return self._gen.uniform(low, high, size=shape).astype(dtype, copy=False)

    def integers(self, low: int, high: int, shape=()) -> np.ndarray:
        """Uniform ints in [low, high)."""
        return self._gen.integers(low, high, size=shape)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._gen.choice(n, size=size, replace=replace)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def bernoulli(self, p: float, shape=()) -> np.ndarray:
        return self._gen.uniform(0.0, 1.0, size=shape) < p
