"""Exact integer arithmetic: factorization, divisor counts, totient,
Moebius, segmented sieve windows, and smooth-number enumeration.

All values are exact integers.  Sieve windows are decomposition
invariant: sieving [1, N] in one window or many yields identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .primes import base_primes

# Largest window (in elements) a single sieve call may allocate.
MAX_WINDOW_ELEMENTS = 1 << 26

# Largest element count smooth_sequence is willing to enumerate.
MAX_SMOOTH_ELEMENTS = 10**8

_TRIAL_LIMIT = 1 << 16  # trial-divide below this, hand the cofactor to sympy
_trial_primes = [int(p) for p in base_primes(_TRIAL_LIMIT)]


class MemoryBudgetError(ValueError):
    """Requested window or enumeration exceeds the configured budget."""


class OverflowFault(OverflowError):
    """A divisor-count value cannot fit the table's integer type."""


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition with strictly increasing primes."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.pairs:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be >= 1")
            if not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
            last = p

    @property
    def n(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= p**e
        return out

    def exponent_of(self, p: int) -> int:
        for q, e in self.pairs:
            if q == p:
                return e
        return 0

    @property
    def distinct_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)


def factorize(n: int) -> Factorization:
    """Exact factorization of n >= 1 (63-bit domain).

    Trial division by sieved primes handles the small part; the remaining
    cofactor goes through sympy's deterministic machinery.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n >= 1 << 63:
        raise ValueError("n exceeds the 63-bit input domain")
    pairs = []
    m = n
    for p in _trial_primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
            pairs.append((m, 1))  # cofactor below trial bound squared is prime
        else:
            for p, e in sorted(sympy.factorint(m).items()):
                pairs.append((int(p), int(e)))
    return Factorization(tuple(pairs))


def tau(f: Factorization, k: int = 2) -> int:
    """Number of ordered k-tuples with product n: prod C(e+k-1, k-1)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    out = 1
    for _, e in f.pairs:
        out *= math.comb(e + k - 1, k - 1)
    return out


def totient_mu(f: Factorization) -> tuple[int, int]:
    """(Euler phi, Moebius mu) of the factorized integer."""
    phi = 1
    mu = 1
    for p, e in f.pairs:
        phi *= p ** (e - 1) * (p - 1)
        mu = 0 if e >= 2 else -mu
    return phi, mu


@dataclass(frozen=True)
class DivisorTable:
    """Dense exact values of tau / tau_k / phi / mu on [lo, hi]."""

    lo: int
    hi: int
    kind: str
    k: int
    values: np.ndarray = field(repr=False)

    def value_at(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])


def _window_exponents(lo, hi, p):
    """Exponent of p for each multiple of p in [lo, hi], as (offset, e)."""
    s1 = ((lo + p - 1) // p) * p
    if s1 > hi:
        return None, None
    off = s1 - lo
    e = np.ones((hi - s1) // p + 1, dtype=np.int64)
    q = p * p
    while q <= hi:
        sq = ((lo + q - 1) // q) * q
        if sq > hi:
            break
        e[(sq - s1) // p :: q // p] += 1
        q *= p
    return off, e


def _ea_prime_table(p: int, m: int, max_e: int) -> np.ndarray:
    """float lookup t[e] for the local value at p^e when p^m || a (m >= 1)."""
    beta_p = Fraction((p - 1) ** 2, p * p - p + 1)
    vals = [1.0]
    for e in range(1, max_e + 1):
        if e == m:
            vals.append(float(m + 1 / beta_p))
        else:
            vals.append(float(min(e + 1, m + 1)))
    return np.array(vals, dtype=np.float64)


def window_tables(
    lo: int,
    hi: int,
    *,
    k: int | None = 2,
    phi: bool = False,
    mu: bool = False,
    ea_of: Factorization | None = None,
    sieving_primes: np.ndarray | None = None,
) -> dict[str, np.ndarray]:
    """One sieve pass over [lo, hi] producing any of tau_k / phi / mu / e_a.

    Exponents of each prime <= sqrt(hi) are extracted with strided slices;
    the single leftover prime > sqrt(hi) is handled from the remainder
    column.  The e_a table is float64 (its values on prime powers are
    rationals); all integer tables are exact int64.
    """
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    size = hi - lo + 1
    if size > MAX_WINDOW_ELEMENTS:
        raise MemoryBudgetError(
            f"window of {size} elements exceeds budget {MAX_WINDOW_ELEMENTS}"
        )
    if k is not None and k != 2:
        # tau_k(n) <= k^Omega(n) <= k^log2(hi); reject values that could wrap
        if k ** max(hi, 2).bit_length() >= 1 << 62:
            raise OverflowFault(f"tau_{k} may overflow int64 on [{lo}, {hi}]")
    if sieving_primes is None:
        sieving_primes = base_primes(math.isqrt(hi) + 1)

    rem = np.arange(lo, hi + 1, dtype=np.int64)
    out: dict[str, np.ndarray] = {}
    if k is not None:
        out["tau"] = np.ones(size, dtype=np.int64)
        comb = np.array([math.comb(e + k - 1, k - 1) for e in range(64)], dtype=np.int64)
    if phi:
        out["phi"] = np.ones(size, dtype=np.int64)
    if mu:
        out["mu"] = np.ones(size, dtype=np.int64)
    if ea_of is not None:
        out["ea"] = np.ones(size, dtype=np.float64)
        a_exp = {p: m for p, m in ea_of.pairs}
        max_e = max(hi, 2).bit_length()

    for p in sieving_primes:
        p = int(p)
        if p * p > hi:
            break
        off, e = _window_exponents(lo, hi, p)
        if off is None:
            continue
        pe = p**e
        rem[off::p] //= pe
        if k is not None:
            out["tau"][off::p] *= comb[e]
        if phi:
            out["phi"][off::p] *= pe - pe // p
        if mu:
            seg = out["mu"][off::p]
            seg *= np.where(e == 1, -1, 0)
        if ea_of is not None:
            m = a_exp.get(p)
            if m is None:
                out["ea"][off::p] *= (p - 1) ** 2 / (p * p - p + 1)
            else:
                out["ea"][off::p] *= _ea_prime_table(p, m, max_e)[e]

    left = rem > 1
    if k is not None:
        out["tau"][left] *= k
    if phi:
        out["phi"][left] *= rem[left] - 1
    if mu:
        out["mu"][left] = -out["mu"][left]
    if ea_of is not None:
        r = rem[left].astype(np.float64)
        fac = (r - 1) ** 2 / (r * r - r + 1)
        root = math.isqrt(hi)
        for p, m in ea_of.pairs:
            if p > root:  # prime of a too large for the slice loop
                fac[rem[left] == p] = float(_ea_prime_table(p, m, 1)[1])
        out["ea"][left] *= fac
    return out


def sieve_window(lo: int, hi: int, kind: str = "tau", k: int = 2) -> DivisorTable:
    """Exact DivisorTable for kind in {"tau", "tau_k", "phi", "mu"}."""
    if kind == "tau":
        vals = window_tables(lo, hi, k=2)["tau"]
        k = 2
    elif kind == "tau_k":
        if k < 2:
            raise ValueError("k must be >= 2")
        vals = window_tables(lo, hi, k=k)["tau"]
    elif kind == "phi":
        vals = window_tables(lo, hi, k=None, phi=True)["phi"]
    elif kind == "mu":
        vals = window_tables(lo, hi, k=None, mu=True)["mu"]
    else:
        raise ValueError(f"unknown kind {kind!r}")
    vals.setflags(write=False)
    return DivisorTable(lo=lo, hi=hi, kind=kind, k=k, values=vals)


@dataclass(frozen=True)
class SmoothSequence:
    """All integers <= bound whose prime divisors divide d, sorted.

    s is the number of distinct primes of d; the element count obeys
    D1(bound) <= (8 ln bound)^s for bound >= 2.  d2 is the partial tail
    sum over bound < delta <= d2_cutoff of 1/delta (0.0 when no cutoff
    was requested).
    """

    d: int
    bound: float
    s: int
    elements: tuple[int, ...]
    d2_cutoff: float | None = None
    d2: float = 0.0

    @property
    def d1(self) -> int:
        return len(self.elements)


def _enumerate_smooth(primes: tuple[int, ...], bound: float) -> list[int]:
    out = []

    def rec(i: int, value: int):
        if i == len(primes):
            out.append(value)
            return
        p = primes[i]
        while value <= bound:
            rec(i + 1, value)
            value *= p
    rec(0, 1)
    return sorted(out)


def smooth_sequence(d: int, bound: float, d2_cutoff: float | None = None) -> SmoothSequence:
    """Enumerate the d-smooth integers up to bound (1 always included)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if bound < 1:
        raise ValueError("bound must be >= 1")
    primes = factorize(d).distinct_primes
    s = len(primes)
    if bound >= 2 and (8 * math.log(bound)) ** s > MAX_SMOOTH_ELEMENTS:
        raise MemoryBudgetError(
            f"count bound (8 ln bound)^{s} exceeds budget {MAX_SMOOTH_ELEMENTS}"
        )
    elements = _enumerate_smooth(primes, bound)
    d2 = 0.0
    if d2_cutoff is not None:
        if d2_cutoff < bound:
            raise ValueError("d2_cutoff must be >= bound")
        if (8 * math.log(max(d2_cutoff, 2.0))) ** s > MAX_SMOOTH_ELEMENTS:
            raise MemoryBudgetError("d2_cutoff enumeration exceeds budget")
        tail = _enumerate_smooth(primes, d2_cutoff)
        d2 = math.fsum(1.0 / delta for delta in tail if delta > bound)
    return SmoothSequence(
        d=d, bound=bound, s=s, elements=tuple(elements), d2_cutoff=d2_cutoff, d2=d2
    )
