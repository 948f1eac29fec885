"""Seeded, portable randomness.

Every stochastic stage draws from a named stream derived from the single
top-level seed, so results are reproducible across runs, platforms, and
library versions. The generator is SplitMix64 (Steele, Lea & Flood 2014):
a 64-bit counter-based mixer that is trivial to reimplement elsewhere.
Stream names (e.g. ``curation.undersample/fake/19-35``) are hashed with
FNV-1a and folded into the seed, so strata can be processed independently
and in parallel without changing any draw.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class SplitMix64:
    """64-bit SplitMix generator with helpers for sampling."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """Uniform float in [low, high) with 53 bits of precision."""
        u = (self.next_u64() >> 11) * 2.0**-53
        return low + (high - low) * u

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices drawn uniformly from range(n).

        Implemented as the first k steps of a Fisher-Yates shuffle with a
        sparse swap table, so it is O(k) regardless of n.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        swaps: dict[int, int] = {}
        out: list[int] = []
        for i in range(k):
            j = i + self.randbelow(n - i)
            out.append(swaps.get(j, j))
            swaps[j] = swaps.get(i, i)
        return out

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, name: str) -> int:
    """Fold a stream name into the top-level seed.

    FNV-1a hashes the name; two SplitMix64 rounds decorrelate streams whose
    names differ in few bits.
    """
    h = _FNV_OFFSET
    for byte in name.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    mixer = SplitMix64((seed & _MASK64) ^ h)
    mixer.next_u64()
    return mixer.next_u64()


def stream(seed: int, name: str) -> SplitMix64:
    """Named sub-stream of the top-level seed."""
    return SplitMix64(derive_seed(seed, name))
