"""Deterministic random primitives used for splits, balancing, and hashing.

Two fixed algorithms so that every seeded operation is reproducible
bit-for-bit, across runs and across reimplementations:

* ``SplitMix64`` — Vigna's splitmix64 generator.  State advances by the
  odd constant 0x9E3779B97F4A7C15; each output is the new state pushed
  through two xor-shift-multiply rounds.  First outputs for seed 0:
  0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F (test
  vectors asserted in tests/test_rng.py and listed in the README).

* ``hash64`` — FNV-1a over UTF-8 bytes, offset basis 0xCBF29CE484222325,
  prime 0x100000001B3.  hash64("") = 0xCBF29CE484222325,
  hash64("a") = 0xAF63DC4C8601EC8C, hash64("foobar") = 0x85944171F73967E8.

Bounded draws use unbiased rejection sampling: draw 64-bit words,
reject values >= floor(2^64 / n) * n, return the remainder mod n.
Shuffling is the descending Fisher-Yates walk (i from n-1 down to 1,
j = bounded draw on i+1, swap).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class SplitMix64:
    """splitmix64 stream; the seed is reduced modulo 2^64."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Unbiased draw from 0..n-1 by rejection sampling."""
        if n <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < threshold:
                return r % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, descending index order."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_with_replacement(self, n: int, k: int) -> list[int]:
        """k independent draws from 0..n-1, in draw order."""
        return [self.below(n) for _ in range(k)]


def hash64(text: str) -> int:
    """64-bit FNV-1a of the UTF-8 encoding of ``text``."""
    h = FNV_OFFSET_BASIS
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h
