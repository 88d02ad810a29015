"""Splittable counter-based random streams.

Built on numpy's Philox bit generator: a stream is identified by
``(seed, path)`` where ``path`` is a tuple of split indices.  Splitting
never consumes state from the parent, so any task tree reproduces
bit-for-bit from the root seed alone.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _mix(seed: int, path: tuple[int, ...]) -> np.ndarray:
    # Hash (seed, path) into a 128-bit Philox key.
    h = hashlib.blake2b(digest_size=16)
    h.update(str(seed).encode())
    for p in path:
        h.update(b"/")
        h.update(str(p).encode())
    d = h.digest()
    return np.frombuffer(d, dtype=np.uint64)


class RandomStream:
    """Reproducible random stream addressable by (seed, split path)."""

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        self._gen = None

    def split(self, index: int) -> "RandomStream":
        """Child stream; independent of the parent and of siblings."""
        return RandomStream(self.seed, self.path + (int(index),))

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = _mix(self.seed, self.path)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, path={self.path})"
