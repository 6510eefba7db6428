"""Acceptance gate: one pass/fail line per criterion, printed unbuffered
so the verdicts survive pytest's capture.

Criterion 1 is asserted exactly as stated and is expected to fail: the
printed reference value 0.757827651 disagrees with the defining product
in its 8th digit (the converged product, bracketed rigorously from both
sides, is 0.7578277107).  See the repository notes for the analysis.
"""

import json
import math
import shutil
import subprocess
import sys
import time

import pytest
from conftest import record_acceptance

from tau_ratio_lab import constants, series, sums
from tau_ratio_lab.arithmetic import smooth_sequence, window_tables
from tau_ratio_lab.cli import run
from tau_ratio_lab.reference_values import (
    K_REFERENCE,
    K_REFERENCE_TOL,
    KAPPA_REFERENCE,
)


def _report(num, name, ok, detail=""):
    line = f"ACCEPTANCE {num:>2} {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" ({detail})"
    print(line, file=sys.__stdout__, flush=True)
    record_acceptance(line)
    assert ok, line


@pytest.fixture(scope="module")
def verify_reports():
    cps = (10**4, 10**5, 10**6, 10**7)
    t0 = time.perf_counter()
    conv = sums.convergence_report(1, cps)
    lem = {a: sums.lemma12_consistency(a, cps) for a in (1, 2)}
    return conv, lem, time.perf_counter() - t0


def test_criterion_01_constant_K(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "constants.json"
    code = run(["constants", "--prec", "1e-9", "--threads", "8",
                "--format", "json", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    assert code == 0
    K = json.loads(out.read_text())["K"]
    dev = abs(K - K_REFERENCE)
    _report(1, "constant K vs printed digits",
            dev <= K_REFERENCE_TOL and elapsed <= 300,
            f"K={K:.10f}, |dev|={dev:.3e}, tol={K_REFERENCE_TOL:g}, "
            f"{elapsed:.1f}s")


def test_criterion_02_kappa_table():
    t0 = time.perf_counter()
    devs = {a: abs(constants.kappa(a).kappa - ref)
            for a, (ref, _) in KAPPA_REFERENCE.items()}
    elapsed = time.perf_counter() - t0
    ok = all(devs[a] <= tol for a, (_, tol) in KAPPA_REFERENCE.items())
    _report(2, "twelve kappa table values",
            ok and elapsed <= 1.0,
            f"max dev={max(devs.values()):.2e}, {elapsed:.2f}s")


def test_criterion_03_closed_form_vs_series():
    worst = max(abs(constants.kappa_closed(p, m) - constants.kappa(p**m).kappa)
                for p in (2, 3, 5) for m in range(1, 5))
    _report(3, "kappa closed form vs series", worst <= 1e-12,
            f"max |diff|={worst:.2e}")


def test_criterion_04_exactness_oracles():
    tau_ok = (window_tables(1, 10**5)["tau"]
              == sums.naive_tau_table(10**5)).all()
    tau3_ok = (window_tables(1, 10**4, k=3)["tau"]
               == sums.naive_tau_k_table(10**4, 3)).all()
    s_ok = all(sums.sum_S_a_exact(1, x) == sums.naive_S_a(1, x)
               for x in (10**2, 10**3, 10**4))
    _report(4, "exactness oracles (tau, tau_3, S_1)",
            bool(tau_ok) and bool(tau3_ok) and s_ok,
            f"tau={bool(tau_ok)}, tau3={bool(tau3_ok)}, S={s_ok}")


def test_criterion_05_multiplicativity():
    import random
    rng = random.Random(99)
    e_ok = True
    for a in (1, 2, 6, 12):
        checked = 0
        while checked < 200:
            m, n = rng.randrange(2, 4000), rng.randrange(2, 4000)
            if math.gcd(m, n) != 1:
                continue
            e_ok = e_ok and (constants.e_a(a, m * n)
                             == constants.e_a(a, m) * constants.e_a(a, n))
            checked += 1
    k_ok = True
    checked = 0
    while checked < 50:
        a1, a2 = rng.randrange(2, 100), rng.randrange(2, 100)
        if math.gcd(a1, a2) != 1 or a1 * a2 > 10**4:
            continue
        k_ok = k_ok and abs(constants.kappa(a1 * a2).kappa
                            - constants.kappa(a1).kappa
                            * constants.kappa(a2).kappa) <= 1e-12
        checked += 1
    _report(5, "multiplicativity of e_a and kappa", e_ok and k_ok,
            f"e_a exact={e_ok}, kappa 1e-12={k_ok}")


def test_criterion_06_lemma10():
    t0 = time.perf_counter()
    devs = {}
    for m in (1, 2, 6):
        emp = sums.sum_inv_phi_coprime(m, 10**6)
        devs[m] = abs(emp - constants.lemma10_prediction(m, 10**6))
    elapsed = time.perf_counter() - t0
    _report(6, "coprime totient sum vs prediction",
            all(d <= 1e-2 for d in devs.values()) and elapsed <= 30,
            f"devs={[f'{devs[m]:.2e}' for m in (1, 2, 6)]}, {elapsed:.1f}s")


def test_criterion_07_dirichlet_identity():
    r1 = series.identity_residual(1, 2, 10**6, 10**5).residual
    r2 = series.identity_residual(2, 2, 10**6, 10**5).residual
    r3 = series.identity_residual(1, 4, 10**4, 10**4).residual
    _report(7, "Dirichlet-series identity residuals",
            r1 <= 1e-5 and r2 <= 1e-5 and r3 <= 1e-10,
            f"r(1,2)={r1:.2e}, r(2,2)={r2:.2e}, r(1,4)={r3:.2e}")


def test_criterion_08_cross_module_identity():
    K = constants.big_K(1e-7)
    C = constants.C_and_prime_sums(1e-7)[0]
    P = 10**6
    ok = True
    worst = 0.0
    for a in (1, 2, 3, 4, 6):
        lhs = (C.value * float(constants.beta(a))
               * series.phi_a(a, 1.0, P) / math.sqrt(math.pi))
        rhs = K.value * constants.kappa(a).kappa
        combined = lhs * (C.tail_bound + 14.0 / P) + rhs * K.tail_bound
        ok = ok and abs(lhs - rhs) <= combined
        worst = max(worst, abs(lhs - rhs))
    _report(8, "K(a) = (1/sqrt(pi)) C beta(a) Phi_a(1)", ok,
            f"max |diff|={worst:.2e}")


def test_criterion_09_asymptotic_trends(verify_reports):
    conv, lem, elapsed = verify_reports
    e_dev = [r.normalized_deviation for r in conv.e_rows]
    e_ok = all(v < u for u, v in zip(e_dev, e_dev[1:]))
    s_dev = [r.normalized_deviation for r in conv.rows][-3:]
    s_ok = sum(1 for u, v in zip(s_dev, s_dev[1:]) if v > u) <= 1
    env_ok = all(lem[a].verdict["envelope_ok"] for a in (1, 2))
    _report(9, "asymptotic trends to 1e7",
            e_ok and s_ok and env_ok and elapsed <= 600,
            f"E strict={e_ok}, theorem trend={s_ok}, envelope={env_ok}, "
            f"{elapsed:.0f}s")


def test_criterion_10_smooth_bound():
    ok = True
    for d in (2, 6, 30):
        s = len(set(constants.factorize(d).distinct_primes))
        for x in (10**2, 10**4, 10**6):
            ok = ok and smooth_sequence(d, x).d1 <= (8 * math.log(x)) ** s
    # brute-force validation at 1e4 for d=6
    brute = [n for n in range(1, 10**4 + 1)
             if all(p in (2, 3) for p in
                    constants.factorize(n).distinct_primes)]
    ok = ok and list(smooth_sequence(6, 10**4).elements) == brute
    _report(10, "smooth-count bound and enumeration", ok)


def test_criterion_11_determinism(tmp_path):
    exe = shutil.which("tau-ratio-lab")
    base = [exe] if exe else [sys.executable, "-m", "tau_ratio_lab.cli"]
    outputs = []
    for i, threads in enumerate(("1", "1", "1", "8")):
        out = tmp_path / f"d{i}.csv"
        r = subprocess.run(
            base + ["verify", "--a", "1", "--xmax", "1e6", "--threads",
                    threads, "--format", "csv", "--out", str(out)],
            capture_output=True)
        assert r.returncode in (0, 2), r.stderr.decode()
        outputs.append(out.read_bytes())
    ok = all(o == outputs[0] for o in outputs)
    _report(11, "byte-identical verify output", ok,
            f"3 runs + threads 1 vs 8, {len(outputs[0])} bytes")
