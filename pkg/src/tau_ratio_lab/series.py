"""Dirichlet-series side: the identity F_a(s) = sqrt(zeta(s)) * Phi_a(s)
verified on the real axis s > 1, plus the mean-value prediction for E_a.

F_a(s) = sum e_a(n)/(tau(n) n^s).  Phi_a(s) = Phi(s) * psi_a(s) with
Phi(s) = prod_p (1 - 1/p^s)^(1/2) (1 - beta(p) - beta(p) p^s ln(1 - p^-s))
and psi_a a finite product over p | a swapping in the exact e_a local
series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import constants
from .arithmetic import factorize, window_tables
from .primes import base_primes

_ZETA_TERMS = 10**6


class SingularTruncationError(ArithmeticError):
    """A truncated Euler factor came out <= 0 at the requested s."""


@dataclass(frozen=True)
class SeriesEvaluation:
    a: int
    s: float
    N: int
    lhs: float
    rhs: float
    residual: float
    lhs_tail_bound: float


def zeta_direct(s: float) -> float:
    """zeta(s) for real s > 1: direct series plus integral tail."""
    if s <= 1:
        raise ValueError("s must be > 1")
    n = np.arange(1, _ZETA_TERMS + 1, dtype=np.float64)
    partial = float(np.sum(n ** (-s)))
    return partial + _ZETA_TERMS ** (1 - s) / (s - 1)


def F_a_truncated(a: int, s: float, N: int) -> float:
    """Partial Dirichlet sum sum_{n<=N} e_a(n)/(tau(n) n^s)."""
    if s <= 1:
        raise ValueError("s must be > 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    fa = factorize(a)
    sieving = base_primes(math.isqrt(N) + 1)
    parts = []
    window = 1 << 20
    lo = 1
    while lo <= N:
        hi = min(lo + window - 1, N)
        t = window_tables(lo, hi, k=2, ea_of=fa, sieving_primes=sieving)
        n = np.arange(lo, hi + 1, dtype=np.float64)
        parts.append(float(np.sum(t["ea"] / (t["tau"] * n**s))))
        lo = hi + 1
    return constants._kahan_combine(parts)


def _local_factor_generic(p: int, s: float) -> float:
    """1 - beta(p) - beta(p) p^s ln(1 - p^-s), the p-not-dividing-a factor."""
    b = float(constants._beta_p(p))
    x = p ** (-s)
    return 1.0 - b - b * math.log1p(-x) / x


def _local_factor_dividing(p: int, m: int, s: float) -> float:
    """The local F_a factor at p^m || a: exact e_a(p^k) series in closed form."""
    b = Fraction((p - 1) ** 2, p * p - p + 1)
    x = p ** (-s)
    out = 1.0
    for k in range(1, m):
        out += x**k
    out += float(m + 1 / b) * x**m / (m + 1)
    tail = (-math.log1p(-x) - x) / x
    for k in range(1, m + 1):
        tail -= x**k / (k + 1)
    return out + (m + 1) * tail


def phi_a(a: int, s: float, P: int) -> float:
    """Truncated Phi_a(s) = prod_{p<=P} Phi_p(s) * psi_a(s).

    At s = 1 each Phi_p collapses to
    sqrt(1-1/p) * p (1 + (p-1)^2 ln(p/(p-1))) / (p^2-p+1),
    which avoids the cancellation between the 1 - beta(p) terms.
    """
    if s <= 0.5:
        raise ValueError("s must be > 1/2")
    if P < 2:
        raise ValueError("P must be >= 2")
    primes = base_primes(P)
    p = primes.astype(np.float64)
    if s == 1.0:
        L = -np.log1p(-1.0 / p)
        factors = np.sqrt(1.0 - 1.0 / p) * (
            p * (1.0 + (p - 1.0) ** 2 * L) / (p * p - p + 1.0)
        )
    else:
        x = p ** (-s)
        b = (p - 1.0) ** 2 / (p * p - p + 1.0)
        factors = np.sqrt(1.0 - x) * (1.0 - b - b * np.log1p(-x) / x)
    if np.any(factors <= 0):
        bad = int(primes[np.argmax(factors <= 0)])
        raise SingularTruncationError(f"factor at p={bad} is <= 0 at s={s}")
    value = math.exp(float(np.sum(np.log(factors))))
    # psi_a: replace the generic local series by the exact e_a one at p | a
    for q, m in factorize(a).pairs:
        num = _local_factor_dividing(q, m, s)
        den = _local_factor_generic(q, s)
        if num <= 0 or den <= 0:
            raise SingularTruncationError(f"psi factor at p={q} is <= 0 at s={s}")
        value *= num / den
    return value


def identity_residual(a: int, s: float, N: int, P: int) -> SeriesEvaluation:
    """Residual of F_a(s) = sqrt(zeta(s)) * Phi_a(s) at a truncation pair."""
    lhs = F_a_truncated(a, s, N)
    rhs = math.sqrt(zeta_direct(s)) * phi_a(a, s, P)
    return SeriesEvaluation(
        a=a,
        s=s,
        N=N,
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        lhs_tail_bound=N ** (1 - s) / (s - 1),
    )


def E_prediction(a: int, x: float, target_tail: float = 1e-9, threads: int = 1) -> float:
    """Mean-value main term (Phi_a(1)/sqrt(pi)) * x / sqrt(ln x).

    Phi_a(1) is recovered as K(a) sqrt(pi) / (C beta(a)); C comes from
    the zeta-value route (cheap and tighter than any product truncation).
    """
    if x < 3:
        raise ValueError("x must be >= 3")
    C, _ = constants.C_zeta_route()
    lead = constants.K_of_a(a, target_tail, threads) / (C * float(constants.beta(a)))
    return lead * x / math.sqrt(math.log(x))
