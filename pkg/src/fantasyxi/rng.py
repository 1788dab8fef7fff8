"""Deterministic random streams (splitmix64).

Every randomized step in the package draws from this generator rather than
`random` or numpy so that results are bit-stable across platforms, Python
versions, and the native/pure kernel backends (the native kernel re-implements
the identical integer recurrence). Substreams derived from (seed, index) are
independent, which lets parallel workers reproduce the serial result exactly.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_STREAM_SALT = 0xD1B54A32D192ED03

_INV_2_53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer: a 64-bit bijective scramble."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def stream_seed(seed: int, index: int) -> int:
    """State for the `index`-th substream of `seed` (used per tree, per match)."""
    return mix64((seed * _GAMMA + index * _STREAM_SALT + 1) & _MASK)


class Rng:
    """splitmix64 generator with the helpers the pipeline needs."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return mix64(self.state)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n). Multiply-truncate; bias is negligible
        for the desk-scale n used here and the scheme is trivial to mirror
        in the native kernel."""
        r = int(self.next_double() * n)
        return n - 1 if r >= n else r

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.randbelow(hi - lo + 1)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.next_double() * (hi - lo)

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items: list, k: int) -> list:
        """k distinct items, order randomized (partial Fisher-Yates)."""
        pool = list(items)
        out = []
        for i in range(k):
            j = i + self.randbelow(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
            out.append(pool[i])
        return out

    def choice(self, items):
        return items[self.randbelow(len(items))]

    def gauss_like(self, lo: float, hi: float) -> float:
        """Mean of three uniforms mapped to [lo, hi]; a cheap bell shape."""
        u = (self.next_double() + self.next_double() + self.next_double()) / 3.0
        return lo + u * (hi - lo)


def bounded_threshold(lo: float, hi: float, u: float) -> float:
    """Split threshold lo + u*(hi-lo), guaranteed strictly below hi.

    With u close to 1 the product can round up to hi, which would produce an
    empty right child; clamp to the previous representable double.
    """
    t = lo + u * (hi - lo)
    if t >= hi:
        t = math.nextafter(hi, lo)
    return t
