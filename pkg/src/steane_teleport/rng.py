"""Counter-based random streams, one per shot."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_BLOCK = 512


class RandomSource:
    """Philox stream keyed by ``(seed, stream_id)``.

    Two sources with the same key produce identical draws regardless of what
    other streams were consumed, so any shot can be rerun on its own.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self._buf: list[float] = []

    @classmethod
    def for_shot(cls, seed: int, input_index: int, shot_index: int) -> "RandomSource":
        return cls(seed, (input_index << 48) | shot_index)

    def uniform(self) -> float:
        if not self._buf:
            self._buf = self._gen.random(_BLOCK).tolist()
            self._buf.reverse()
        return self._buf.pop()

    def below(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        return min(int(self.uniform() * k), k - 1)

    def measurement_bit(self, branch: bool = False) -> int:
        return 1 if self.uniform() < 0.5 else 0

    @property
    def generator(self) -> np.random.Generator:
        return self._gen
