"""Segmented sieve of Eratosthenes."""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

SEGMENT = 1 << 18


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def prime_segments(x: int, segment: int = SEGMENT) -> Iterator[np.ndarray]:
    """Ascending arrays of the primes <= x, one per sieve window.

    Memory is O(sqrt(x) + segment).
    """
    x = int(x)
    if x < 2:
        return
    base = _small_primes(math.isqrt(x))
    lo = 2
    while lo <= x:
        hi = min(lo + segment, x + 1)  # window [lo, hi)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo :: p] = False
        yield np.flatnonzero(flags).astype(np.int64) + lo
        lo = hi


def sieve_primes(x: int) -> Iterator[int]:
    for seg in prime_segments(x):
        yield from seg.tolist()


def primes_upto(x: int) -> np.ndarray:
    segs = list(prime_segments(x))
    return np.concatenate(segs) if segs else np.empty(0, dtype=np.int64)


def primes_between(lo: float, hi: float) -> list[int]:
    """Primes p with lo <= p <= hi."""
    if hi < 2:
        return []
    ps = primes_upto(math.floor(hi))
    return ps[ps >= math.ceil(lo)].tolist()


def prime_pi(x: float) -> int:
    return int(sum(len(s) for s in prime_segments(math.floor(x))))
