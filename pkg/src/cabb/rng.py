"""Portable seeded PRNG: xoshiro256** with state expanded by splitmix64.

Streams depend only on the integer seed, never on the host's default RNG,
so generated instances are identical across platforms and implementations.
Constants follow the reference C code of Blackman and Vigna.
"""
from __future__ import annotations

from typing import Sequence, TypeVar

MASK64 = (1 << 64) - 1
T = TypeVar("T")


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Mix several integers into one 64-bit seed (order-sensitive)."""
    h = 0x243F6A8885A308D3
    for p in parts:
        _, h = splitmix64((h ^ (int(p) & MASK64)) & MASK64)
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    def __init__(self, seed: int):
        sm = int(seed) & MASK64
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    @classmethod
    def from_state(cls, state: Sequence[int]) -> "Xoshiro256":
        rng = cls(0)
        rng._s = [int(v) & MASK64 for v in state]
        return rng

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both ends inclusive."""
        return low + self.below(high - low + 1)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct integers from range(n), in draw order (partial Fisher-Yates)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
