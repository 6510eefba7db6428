"""Prime generation: dense base sieves and segmented enumeration.

Everything here is deterministic and allocation-bounded; the segmented
iterator yields primes in ascending chunks so downstream reductions can
fix their combining order.
"""

from __future__ import annotations

import math

import numpy as np

# Segment size for the chunked prime iterator.  Chunk boundaries are
# absolute (independent of thread count or caller), which keeps every
# chunk's content bit-reproducible.
CHUNK = 1 << 24


def base_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (plain sieve of Eratosthenes)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def primes_in_segment(lo: int, hi: int, sieving_primes: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi]; sieving_primes must cover sqrt(hi)."""
    if hi < 2:
        return np.empty(0, dtype=np.int64)
    lo = max(lo, 2)
    sieve = np.ones(hi - lo + 1, dtype=bool)
    for p in sieving_primes:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        sieve[start - lo :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64) + lo


def chunk_bounds(limit: int, start: int = 2) -> list[tuple[int, int]]:
    """Absolute chunk grid [start, limit] in steps of CHUNK."""
    bounds = []
    lo = start
    while lo <= limit:
        hi = min(lo + CHUNK - 1, limit)
        bounds.append((lo, hi))
        lo = hi + 1
    return bounds


def iter_prime_chunks(limit: int):
    """Yield ascending int64 arrays of primes covering [2, limit]."""
    sieving = base_primes(math.isqrt(limit) + 1)
    for lo, hi in chunk_bounds(limit):
        yield primes_in_segment(lo, hi, sieving)
