"""Streaming empirical sums: S_a(x) = sum tau(n)/tau_k(n+a),
E_a(x) = sum e_a(n)/tau(n), the coprime totient sum, and their
checkpointed comparison against the predicted main terms.

Accumulation is deterministic by construction: terms are grouped into
absolute 1024-element blocks, each block reduced with np.sum, and the
ordered block sums combined with compensated addition.  Window size
therefore never changes the emitted bits.  Checkpoints at x <= 10^4 are
additionally snapshotted from an exact rational accumulation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import constants, series
from .arithmetic import factorize, window_tables
from .primes import base_primes

BLOCK = 1024
DEFAULT_WINDOW = 1 << 20
MAX_X = 10**9

# below this, checkpoint snapshots come from exact rational accumulation
EXACT_LIMIT = 10**4


@dataclass(frozen=True)
class CheckpointRow:
    x: int
    raw_sum: float
    prediction: float | None
    normalized_deviation: float
    elapsed: float


@dataclass(frozen=True)
class ConvergenceReport:
    a: int
    k: int
    rows: tuple[CheckpointRow, ...]
    report_kind: str
    verdict: dict
    e_rows: tuple[CheckpointRow, ...] = ()


def _check_checkpoints(checkpoints, minimum=1):
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ValueError("empty checkpoint list")
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if cps[0] < minimum:
        raise ValueError(f"checkpoints must be >= {minimum}")
    if cps[-1] > MAX_X:
        raise ValueError(f"checkpoint {cps[-1]} exceeds the limit {MAX_X}")
    return cps


class _BlockStream:
    """Deterministic accumulator over absolute 1024-aligned blocks."""

    def __init__(self):
        self.total = 0.0
        self.comp = 0.0

    def add_blocks(self, block_sums):
        for s in block_sums:
            y = float(s) - self.comp
            t = self.total + y
            self.comp = (t - self.total) - y
            self.total = t

    def snapshot(self, partial: float) -> float:
        return self.total + partial


def exact_e_a_of_n(a: int, n: int) -> Fraction:
    """e_a(n) as an exact rational via its local values."""
    out = Fraction(1)
    for p, e in factorize(n).pairs:
        out *= constants.e_a_prime_power(a, p, e)
    return out


def sum_S_a_exact(a: int, x: int, k: int = 2) -> Fraction:
    """Exact rational S_a(x) from sieved integer tau tables."""
    tab = window_tables(1, x + a, k=2)["tau"]
    den = tab if k == 2 else window_tables(1, x + a, k=k)["tau"]
    total = Fraction(0)
    for n in range(1, x + 1):
        total += Fraction(int(tab[n - 1]), int(den[n + a - 1]))
    return total


def sum_E_a_exact(a: int, x: int) -> Fraction:
    """Exact rational E_a(x) = sum e_a(n)/tau(n)."""
    tab = window_tables(1, x, k=2)["tau"]
    total = Fraction(0)
    for n in range(1, x + 1):
        total += exact_e_a_of_n(a, n) / int(tab[n - 1])
    return total


def _stream(a: int, k: int, checkpoints, window: int = DEFAULT_WINDOW):
    """One sieve pass; returns {x: (S_a(x), E_a(x))} float snapshots."""
    cps = _check_checkpoints(checkpoints)
    if window % BLOCK:
        raise ValueError("window must be a multiple of the block size")
    xmax = cps[-1]
    fa = factorize(a)
    sieving = base_primes(math.isqrt(xmax + a) + 1)
    s_acc, e_acc = _BlockStream(), _BlockStream()
    snaps: dict[int, tuple[float, float]] = {}
    pending = list(cps)

    lo = 1
    while lo <= xmax:
        hi = min(lo + window - 1, xmax)
        t = window_tables(lo, hi + a, k=2, ea_of=fa, sieving_primes=sieving)
        tau = t["tau"]
        den = tau if k == 2 else window_tables(
            lo, hi + a, k=k, sieving_primes=sieving)["tau"]
        n_el = hi - lo + 1
        s_terms = tau[:n_el] / den[a : n_el + a]
        e_terms = t["ea"][:n_el] / tau[:n_el]

        full = (n_el // BLOCK) * BLOCK
        s_blocks = s_terms[:full].reshape(-1, BLOCK).sum(axis=1)
        e_blocks = e_terms[:full].reshape(-1, BLOCK).sum(axis=1)
        added = 0  # blocks of this window already in the accumulators
        while pending and pending[0] <= hi:
            c = pending.pop(0)
            b = (c - lo + 1) // BLOCK  # full blocks strictly before c's block
            s_acc.add_blocks(s_blocks[added:b])
            e_acc.add_blocks(e_blocks[added:b])
            added = b
            part = slice(b * BLOCK, c - lo + 1)
            snaps[c] = (
                s_acc.snapshot(float(np.sum(s_terms[part]))),
                e_acc.snapshot(float(np.sum(e_terms[part]))),
            )
        s_acc.add_blocks(s_blocks[added:])
        e_acc.add_blocks(e_blocks[added:])
        if full < n_el:  # trailing partial block, only at x = xmax
            s_acc.add_blocks([float(np.sum(s_terms[full:]))])
            e_acc.add_blocks([float(np.sum(e_terms[full:]))])
        lo = hi + 1

    # exact rational snapshots override the float stream at small x
    small = [c for c in cps if c <= EXACT_LIMIT]
    if small:
        tab = window_tables(1, small[-1] + a, k=2)["tau"]
        den = tab if k == 2 else window_tables(1, small[-1] + a, k=k)["tau"]
        s_ex, e_ex = Fraction(0), Fraction(0)
        it = iter(small)
        nxt = next(it)
        for n in range(1, small[-1] + 1):
            s_ex += Fraction(int(tab[n - 1]), int(den[n + a - 1]))
            e_ex += exact_e_a_of_n(a, n) / int(tab[n - 1])
            if n == nxt:
                snaps[n] = (float(s_ex), float(e_ex))
                nxt = next(it, None)
    return snaps


def sum_S_a(a: int, k: int = 2, checkpoints=(10**3, 10**4, 10**5, 10**6),
            target_tail: float = 1e-9, threads: int = 1,
            window: int = DEFAULT_WINDOW) -> list[CheckpointRow]:
    """S_a checkpoints; prediction K(a) x sqrt(ln x) when k = 2."""
    if a < 1 or k < 2:
        raise ValueError("need a >= 1 and k >= 2")
    t0 = time.perf_counter()
    snaps = _stream(a, k, checkpoints, window)
    Ka = constants.K_of_a(a, target_tail, threads) if k == 2 else None
    rows = []
    for x in sorted(snaps):
        s, _ = snaps[x]
        if k == 2:
            pred = Ka * x * math.sqrt(math.log(x))
            dev = abs(s / (x * math.sqrt(math.log(x))) - Ka)
        else:
            pred, dev = None, math.nan
        rows.append(CheckpointRow(x, s, pred, dev, time.perf_counter() - t0))
    return rows


def sum_E_a(a: int, checkpoints=(10**3, 10**4, 10**5, 10**6),
            target_tail: float = 1e-9, threads: int = 1,
            window: int = DEFAULT_WINDOW) -> list[CheckpointRow]:
    """E_a checkpoints; prediction (Phi_a(1)/sqrt(pi)) x / sqrt(ln x)."""
    if a < 1:
        raise ValueError("a must be >= 1")
    t0 = time.perf_counter()
    snaps = _stream(a, 2, checkpoints, window)
    C, _ = constants.C_zeta_route()
    lead = constants.K_of_a(a, target_tail, threads) / (C * float(constants.beta(a)))
    rows = []
    for x in sorted(snaps):
        _, e = snaps[x]
        pred = lead * x / math.sqrt(math.log(x))
        dev = abs(e * math.sqrt(math.log(x)) / x - lead)
        rows.append(CheckpointRow(x, e, pred, dev, time.perf_counter() - t0))
    return rows


def sum_inv_phi_coprime(m: int, x: int, window: int = DEFAULT_WINDOW) -> float:
    """sum over q <= x, gcd(q, m) = 1, of 1/phi(q); compensated."""
    if m < 1 or x < 1:
        raise ValueError("need m >= 1 and x >= 1")
    primes_m = factorize(m).distinct_primes
    sieving = base_primes(math.isqrt(x) + 1)
    acc = _BlockStream()
    lo = 1
    while lo <= x:
        hi = min(lo + window - 1, x)
        phi = window_tables(lo, hi, k=None, phi=True,
                            sieving_primes=sieving)["phi"]
        terms = 1.0 / phi
        q = np.arange(lo, hi + 1, dtype=np.int64)
        for p in primes_m:
            terms[q % p == 0] = 0.0
        n_el = hi - lo + 1
        full = (n_el // BLOCK) * BLOCK
        acc.add_blocks(terms[:full].reshape(-1, BLOCK).sum(axis=1))
        if full < n_el:
            acc.add_blocks([float(np.sum(terms[full:]))])
        lo = hi + 1
    return acc.total


def lemma12_consistency(a: int, checkpoints, threads: int = 1,
                        window: int = DEFAULT_WINDOW) -> ConvergenceReport:
    """Envelope R(x) = |S_a - C beta(a) (ln x) E_a| / (x ln ln x)."""
    cps = _check_checkpoints(checkpoints, minimum=16)
    t0 = time.perf_counter()
    snaps = _stream(a, 2, cps, window)
    C, _ = constants.C_zeta_route()
    ba = float(constants.beta(a))
    rows = []
    for x in cps:
        s, e = snaps[x]
        pred = C * ba * math.log(x) * e
        r = abs(s - pred) / (x * math.log(math.log(x)))
        rows.append(CheckpointRow(x, s, pred, r, time.perf_counter() - t0))
    r_first, r_last = rows[0].normalized_deviation, rows[-1].normalized_deviation
    verdict = {"envelope_ok": r_last <= max(1.0, 2.0 * r_first),
               "R_first": r_first, "R_last": r_last}
    return ConvergenceReport(a=a, k=2, rows=tuple(rows),
                             report_kind="lemma12", verdict=verdict)


def convergence_report(a: int, checkpoints, target_tail: float = 1e-9,
                       threads: int = 1,
                       window: int = DEFAULT_WINDOW) -> ConvergenceReport:
    """Two deviation tracks against the main terms.

    theorem_ratio rows: |S_a(x)/(x sqrt(ln x)) - K(a)|, expected to shrink
    only like ln ln x / sqrt(ln x); trend asserted over the last three
    checkpoints with at most one violation.  E_ratio rows:
    |E_a(x) sqrt(ln x)/x - Phi_a(1)/sqrt(pi)|, asserted strictly
    decreasing across checkpoints.
    """
    cps = _check_checkpoints(checkpoints, minimum=3)
    if cps[-1] < 1000 * cps[0]:
        raise ValueError("checkpoints must span at least 3 decades")
    t0 = time.perf_counter()
    snaps = _stream(a, 2, cps, window)
    Ka = constants.K_of_a(a, target_tail, threads)
    C, _ = constants.C_zeta_route()
    lead = Ka / (C * float(constants.beta(a)))
    s_rows, e_rows = [], []
    for x in cps:
        s, e = snaps[x]
        rl = math.sqrt(math.log(x))
        s_rows.append(CheckpointRow(
            x, s, Ka * x * rl, abs(s / (x * rl) - Ka),
            time.perf_counter() - t0))
        e_rows.append(CheckpointRow(
            x, e, lead * x / rl, abs(e * rl / x - lead),
            time.perf_counter() - t0))
    e_dev = [r.normalized_deviation for r in e_rows]
    s_dev = [r.normalized_deviation for r in s_rows][-3:]
    violations = sum(1 for u, v in zip(s_dev, s_dev[1:]) if v > u)
    verdict = {
        "e_ratio_strictly_decreasing": all(
            v < u for u, v in zip(e_dev, e_dev[1:])),
        "theorem_ratio_trend_ok": violations <= 1,
        "theorem_trend_violations": violations,
    }
    return ConvergenceReport(a=a, k=2, rows=tuple(s_rows),
                             report_kind="theorem_ratio", verdict=verdict,
                             e_rows=tuple(e_rows))


# ---------------------------------------------------------------- oracles

def naive_tau_table(x: int) -> np.ndarray:
    """tau on [1, x] by divisor slicing (independent of the sieve path)."""
    t = np.zeros(x + 1, dtype=np.int64)
    for d in range(1, x + 1):
        t[d::d] += 1
    return t[1:]


def naive_tau_k_table(x: int, k: int) -> np.ndarray:
    """tau_k on [1, x] by repeated Dirichlet convolution with 1."""
    t = np.ones(x + 1, dtype=np.int64)
    t[0] = 0
    for _ in range(k - 1):
        nxt = np.zeros(x + 1, dtype=np.int64)
        for d in range(1, x + 1):
            nxt[d::d] += t[d]
        t = nxt
    return t[1:]


def naive_S_a(a: int, x: int, k: int = 2) -> Fraction:
    """Exact S_a(x) from naive divisor-count tables."""
    num = naive_tau_table(x + a)
    den = num if k == 2 else naive_tau_k_table(x + a, k)
    total = Fraction(0)
    for n in range(1, x + 1):
        total += Fraction(int(num[n - 1]), int(den[n + a - 1]))
    return total


def naive_E_a(a: int, x: int) -> Fraction:
    """Exact E_a(x) with e_a from the definition sum (not the local form)."""
    tab = naive_tau_table(x)
    total = Fraction(0)
    for n in range(1, x + 1):
        total += constants.e_a(a, n) / int(tab[n - 1])
    return total
