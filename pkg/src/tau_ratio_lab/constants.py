"""The constants: beta(a), e_a(n), kappa(a), K, K(a), C, and the prime
logarithmic sums, via exact rationals and tail-bounded Euler products.

All rational work uses fractions.Fraction; conversion to binary64
happens exactly once at each constant's boundary.  Prime products are
accumulated per absolute chunk and combined in ascending order, so a
given target tail always yields the same bits regardless of threading.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .arithmetic import Factorization, factorize
from .primes import base_primes, chunk_bounds, primes_in_segment

# Euler-Mascheroni constant, standard published digits.
EULER_GAMMA = 0.57721566490153286

# Largest prime cutoff any product/sum is allowed to request.
PRIME_BUDGET = 1 << 31

# The 0.5/p^2 bound on factor-1 of the K product holds from p = 11 on
# (the series coefficient is 11/24; factors at 2, 3, 5, 7 exceed it).
_K_BOUND_MIN_PRIME = 11


class UnreachableTailError(ValueError):
    """target_tail cannot be met under PRIME_BUDGET."""

    def __init__(self, target: float, best: float):
        super().__init__(
            f"target tail {target:g} unreachable; best achievable {best:g}"
        )
        self.target = target
        self.best = best


@dataclass(frozen=True)
class EulerProductResult:
    """A converged prime product (or prime sum) with a rigorous tail.

    For products tail_bound bounds |log(true) - log(computed)|; for the
    prime sum L it bounds |true - computed| directly.
    """

    value: float
    cutoff: int
    tail_bound: float
    factor_count: int


@dataclass(frozen=True)
class KappaBreakdown:
    a: int
    kappa: float
    per_prime: tuple[tuple[int, int, float, float], ...]
    beta_a: Fraction


def _check_target(target_tail: float):
    if not 1e-12 <= target_tail <= 1e-2:
        raise ValueError("target_tail must lie in [1e-12, 1e-2]")


def beta(a: int) -> Fraction:
    """beta(a) = prod over p|a of (p-1)^2/(p^2-p+1); radical-invariant."""
    if a < 1:
        raise ValueError("a must be >= 1")
    out = Fraction(1)
    for p in factorize(a).distinct_primes:
        out *= Fraction((p - 1) ** 2, p * p - p + 1)
    return out


def _beta_p(p: int) -> Fraction:
    return Fraction((p - 1) ** 2, p * p - p + 1)


def e_a(a: int, n: int) -> Fraction:
    """Definition sum e_a(n) = (1/beta(a)) * sum over d|(a,n) of beta(an/d^2)."""
    if a < 1 or n < 1:
        raise ValueError("a and n must be >= 1")
    g = math.gcd(a, n)
    total = Fraction(0)
    for d in sympy.divisors(g):
        total += beta(a * n // (d * d))
    return total / beta(a)


def e_a_prime_power(a: int, p: int, k: int) -> Fraction:
    """e_a at p^k via the piecewise local form; m = v_p(a)."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1:
        raise ValueError("k must be >= 1")
    m = 0
    aa = a
    while aa % p == 0:
        aa //= p
        m += 1
    if m == 0:
        return _beta_p(p)
    if k == m:
        return m + 1 / _beta_p(p)
    return Fraction(min(k + 1, m + 1))


def _log_frac(p: int) -> float:
    """ln(p/(p-1)) without cancellation."""
    return -math.log1p(-1.0 / p)


def _kappa_series(p: int, m: int) -> tuple[float, float]:
    """(numerator, denominator) series of the kappa factor at p, p^m || a.

    Both series collapse to A + B*ln(p/(p-1)) with exact rational A, B:
    sum_{k>=1} x^k/(k+1) = (p*ln(p/(p-1)) - 1) at x = 1/p.
    """
    bp = _beta_p(p)
    # numerator: 1 + sum_{k<m} p^-k  +  (m+1/bp) p^-m/(m+1)
    #            + (m+1)*(series) - (m+1) sum_{k<=m} p^-k/(k+1)
    A = Fraction(1)
    for k in range(1, m):
        A += Fraction(1, p**k)
    A += (m + 1 / bp) * Fraction(1, p**m) / (m + 1)
    A -= m + 1  # the -1 of (m+1)*(p*L - 1)
    for k in range(1, m + 1):
        A -= (m + 1) * Fraction(1, p**k * (k + 1))
    B_num = Fraction((m + 1) * p)
    L = _log_frac(p)
    num = float(A) + float(B_num) * L
    den = float(1 - bp) + float(bp * p) * L
    return num, den


def kappa(a: int) -> KappaBreakdown:
    """kappa(a) = beta(a) * prod over p|a of (num series)/(den series)."""
    if a < 1:
        raise ValueError("a must be >= 1")
    ba = beta(a)
    per_prime = []
    value = float(ba)
    for p, m in factorize(a).pairs:
        num, den = _kappa_series(p, m)
        per_prime.append((p, m, num, den))
        value *= num / den
    return KappaBreakdown(a=a, kappa=value, per_prime=tuple(per_prime), beta_a=ba)


def kappa_closed(p: int, m: int) -> float:
    """The closed forms for kappa(p^m), m = 1..4."""
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= m <= 4:
        raise ValueError("no closed form for m outside 1..4")
    L = _log_frac(p)
    b = float(_beta_p(p))
    den = p * L - 1 + 1 / b
    if m == 1:
        num = 2 * p * L - 1 - 1 / (2 * p) + 1 / (2 * p * b)
    elif m == 2:
        num = 3 * p * L - 2 - 1 / (2 * p) - 1 / (3 * p**2) + 1 / (3 * p**2 * b)
    elif m == 3:
        num = (4 * p * L - 3 - 1 / p - 1 / (3 * p**2)
               - 1 / (4 * p**3) + 1 / (4 * p**3 * b))
    else:
        num = (5 * p * L - 4 - 3 / (2 * p) - 2 / (3 * p**2)
               - 1 / (4 * p**3) - 1 / (5 * p**4) + 1 / (5 * p**4 * b))
    return num / den


def _kahan_combine(parts):
    """Ordered compensated sum of per-chunk partial sums."""
    total = 0.0
    comp = 0.0
    for s in parts:
        y = s - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _chunked_prime_reduce(cutoff: int, per_chunk, threads: int = 1):
    """Apply per_chunk(primes) over the absolute chunk grid, combine in
    ascending order.  Returns (combined sum, prime count)."""
    sieving = base_primes(math.isqrt(cutoff) + 1)
    bounds = chunk_bounds(cutoff)

    def work(b):
        lo, hi = b
        pr = primes_in_segment(lo, hi, sieving)
        return per_chunk(pr), len(pr)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, bounds))
    else:
        results = [work(b) for b in bounds]
    return _kahan_combine(s for s, _ in results), sum(c for _, c in results)


@lru_cache(maxsize=None)
def big_K(target_tail: float, threads: int = 1) -> EulerProductResult:
    """K = (1/sqrt(pi)) prod_p (1/sqrt(p(p-1)) + sqrt(1-1/p)(p-1)ln(p/(p-1))).

    Each factor is 1 + O(1/p^2); factor - 1 <= 0.5/p^2 from p = 11 on,
    and sum_{n>P} n^-2 <= 1/P, so the log-tail past P is at most 0.5/P.
    """
    _check_target(target_tail)
    cutoff = max(int(math.ceil(0.5 / target_tail)), 50)
    if cutoff > PRIME_BUDGET:
        raise UnreachableTailError(target_tail, 0.5 / PRIME_BUDGET)

    def per_chunk(pr):
        p = pr.astype(np.float64)
        L = -np.log1p(-1.0 / p)
        f = 1.0 / np.sqrt(p * (p - 1.0)) + np.sqrt(1.0 - 1.0 / p) * (p - 1.0) * L
        return float(np.sum(np.log(f)))

    log_sum, count = _chunked_prime_reduce(cutoff, per_chunk, threads)
    value = math.exp(log_sum) / math.sqrt(math.pi)
    return EulerProductResult(
        value=value, cutoff=cutoff, tail_bound=0.5 / cutoff, factor_count=count
    )


def _zeta3() -> tuple[float, float]:
    """zeta(3) by direct series to 10^6 with Euler-Maclaurin tail."""
    M = 10**6
    n = np.arange(1, M + 1, dtype=np.float64)
    partial = float(np.sum(1.0 / n**3))
    tail = 0.5 / M**2 - 0.5 / M**3
    return partial + tail, 5e-13


def C_zeta_route() -> tuple[float, float]:
    """C = zeta(2)zeta(3)/zeta(6) with zeta(2), zeta(6) in closed form."""
    z3, z3_err = _zeta3()
    value = (math.pi**2 / 6) * z3 / (math.pi**6 / 945)
    return value, 2 * z3_err  # zeta(3) error scaled through the quotient


def _L_tail(P: int) -> float:
    """Upper bound on sum_{p>P} ln p/(p^2-p+1).

    ln p/(p^2-p+1) < ((P+1)/P) ln p/p^2 for p > P, and partial summation
    against theta(x) < 1.01624 x (valid for all x > 0) gives
    sum_{p>P} ln p/p^2 <= 2*1.01624/P.
    """
    return (P + 1) / P * 2 * 1.01624 / P


def _L_cutoff(target_tail: float) -> int:
    P = max(100, min(int(2.04 / target_tail), PRIME_BUDGET))
    while _L_tail(P) > target_tail:
        P += max(P // 16, 1)
        if P > PRIME_BUDGET:
            raise UnreachableTailError(target_tail, _L_tail(PRIME_BUDGET))
    return P


@lru_cache(maxsize=None)
def C_and_prime_sums(
    target_tail: float, threads: int = 1
) -> tuple[EulerProductResult, EulerProductResult]:
    """(C, L): C = prod_p (1 + 1/(p(p-1))), L = sum_p ln p/(p^2-p+1).

    C's direct product is cross-checked against zeta(2)zeta(3)/zeta(6);
    disagreement beyond the combined bounds is a hard internal error.
    C tail: log(1+1/(p(p-1))) < 1/(p(p-1)), and sum_{n>P} telescopes to
    1/P.  L tail: partial summation against the Chebyshev bound (_L_tail).
    """
    _check_target(target_tail)
    c_cutoff = max(int(math.ceil(1.0 / target_tail)), 100)
    if c_cutoff > PRIME_BUDGET:
        raise UnreachableTailError(target_tail, 1.0 / PRIME_BUDGET)

    def c_chunk(pr):
        p = pr.astype(np.float64)
        return float(np.sum(np.log1p(1.0 / (p * (p - 1.0)))))

    c_log, c_count = _chunked_prime_reduce(c_cutoff, c_chunk, threads)
    c_value = math.exp(c_log)
    c_tail = 1.0 / c_cutoff

    zc, zc_err = C_zeta_route()
    if abs(c_value - zc) > c_value * c_tail + zc_err + 1e-12:
        raise RuntimeError(
            f"C disagreement: direct {c_value!r} vs zeta route {zc!r}"
        )

    l_cutoff = _L_cutoff(target_tail)

    def l_chunk(pr):
        p = pr.astype(np.float64)
        return float(np.sum(np.log(p) / (p * p - p + 1.0)))

    l_value, l_count = _chunked_prime_reduce(l_cutoff, l_chunk, threads)
    l_tail = _L_tail(l_cutoff)

    return (
        EulerProductResult(c_value, c_cutoff, c_tail, c_count),
        EulerProductResult(l_value, l_cutoff, l_tail, l_count),
    )


def K_of_a(a: int, target_tail: float, threads: int = 1) -> float:
    """K(a) = K * kappa(a)."""
    return big_K(target_tail, threads).value * kappa(a).kappa


def lemma10_prediction(m: int, x: float, target_tail: float = 1e-6) -> float:
    """Main term C*beta(m)*(ln x + gamma - L + sum_{p|m} p^2 ln p / ((p-1)(p^2-p+1)))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if x < 3:
        raise ValueError("x must be >= 3")
    C, L = C_and_prime_sums(target_tail)
    corr = 0.0
    for p in factorize(m).distinct_primes:
        corr += p * p * math.log(p) / ((p - 1) * (p * p - p + 1))
    return C.value * float(beta(m)) * (math.log(x) + EULER_GAMMA - L.value + corr)
