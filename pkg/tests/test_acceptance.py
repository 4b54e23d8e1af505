"""Acceptance criteria, one test each; every test also prints a PASS/FAIL line.

The summary lines appear in the "acceptance criteria" section at the end of the
pytest run.  Tolerances and runtime limits are the ones the criteria state.
"""

import json
import math
import random
import time
from pathlib import Path

import numpy as np
import pytest

from carmichael_image import analytics, construction
from carmichael_image.arith import build_tables, carmichael_lambda, factor, lambda_values
from carmichael_image.engine import PrimeSource, available_cpus, count_up_to, membership_bitmap
from carmichael_image.oracle import is_lambda_value, max_witness

from conftest import ACCEPTANCE_LINES

BASELINE = Path(__file__).resolve().parents[1] / "benchmarks" / "baseline.json"
SEED = 20240101


def record(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def big_tables():
    return build_tables(10**6 + 2)


@pytest.fixture(scope="module")
def big_source():
    return PrimeSource.up_to(10**7 + 1)


def test_criterion_01_oracle_equivalence(big_tables, big_source):
    t0 = time.perf_counter()
    x = 10**5
    bitmap = membership_bitmap(x, 1 << 14, big_source)
    mismatches = 0
    witness_failures = 0
    for n in range(1, x + 1):
        verdict = is_lambda_value(n, big_tables)
        if verdict != bool(bitmap[n]):
            mismatches += 1
        if verdict and carmichael_lambda(max_witness(n, big_tables), checked=False) != n:
            witness_failures += 1
    lam = lambda_values(10**6, big_tables)
    values = np.unique(lam[1:]).tolist()
    non_members = sum(1 for v in values if not is_lambda_value(v, big_tables))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and witness_failures == 0 and non_members == 0 and elapsed <= 30
    record(1, "oracle equivalence", ok,
           f"{mismatches} verdict mismatches for n<=1e5, {witness_failures} witness failures, "
           f"{non_members} of {len(values)} distinct lambda(m), m<=1e6, rejected; {elapsed:.1f}s (limit 30s)")


def test_criterion_02_small_exact_counts(big_tables, big_source):
    v10 = count_up_to(10, source=big_source).last.v_lambda
    marks = [10**3, 10**4, 10**5, 10**6, 10**7]
    series = count_up_to(10**7, marks, source=big_source)
    got = {c.x: c.v_lambda for c in series.checkpoints}
    oracle_1e6 = sum(1 for n in range(1, 10**6 + 1) if is_lambda_value(n, big_tables))
    primes = big_source.primes
    pi = {x: int(np.searchsorted(primes, x + 1, side="right")) for x in marks}
    ok = v10 == 6 and got[10**6] == oracle_1e6 and all(got[x] >= pi[x] for x in marks)
    record(2, "small exact counts", ok,
           f"V(10)={v10}; V(1e6)={got[10**6]} vs per-n oracle {oracle_1e6}; "
           + ", ".join(f"V({x:.0e})={got[x]}>=pi={pi[x]}" for x in marks))


def test_criterion_03_determinism(big_source):
    results = {}
    for seg in (2**10, 2**14, 2**18):
        for threads in (1, 4, 8):
            results[(seg, threads)] = count_up_to(10**6, workers=threads, segment_size=seg,
                                                  source=big_source).last.v_lambda
    distinct = set(results.values())
    record(3, "determinism", len(distinct) == 1,
           f"V(1e6) over 3 segment sizes x 3 thread counts: {sorted(distinct)}")


def test_criterion_04_constants():
    t0 = time.perf_counter()
    eta, alpha = analytics.ETA, analytics.ALPHA
    gap30 = abs(analytics.beta(30) - eta)
    elapsed = time.perf_counter() - t0
    ok_eta = abs(eta - 0.08607) < 5e-6
    ok_alpha = abs(alpha - 0.057913) < 5e-7
    ok_beta = gap30 < 1e-4
    record(4, "constants", ok_eta and ok_alpha and ok_beta and elapsed < 1,
           f"eta={eta:.8f} (|d|={abs(eta - 0.08607):.1e}, tol 5e-6); "
           f"alpha=1-e*log2/2={alpha:.8f} (|d| from 0.057913 = {abs(alpha - 0.057913):.1e}, tol 5e-7); "
           f"|beta_30-eta|={gap30:.1e}; {elapsed * 1e3:.1f}ms")


def test_criterion_05_f_profile():
    t0 = time.perf_counter()
    profiles = [analytics.f_profile(k, grid_points=101) for k in range(2, 13)]
    elapsed = time.perf_counter() - t0
    bad = [p.k for p in profiles if not p.holds]
    worst_end = max(max(abs(p.f_at_0), abs(p.f_at_k)) for p in profiles)
    worst_interior = max(p.interior_max for p in profiles)
    record(5, "f(t) suite", not bad and elapsed < 1,
           f"k in [2,12]: max |f(0)|,|f(k)|={worst_end:.1e}, max interior f={worst_interior:.3e} "
           f"over 99 points, min f''={min(p.fpp_min for p in profiles):.3e}; failing k: {bad}; "
           f"{elapsed * 1e3:.0f}ms")


def test_criterion_06_lemma1(big_tables):
    t0 = time.perf_counter()
    ratios = [analytics.lemma1_ratio(10**6, h, big_tables).ratio for h in range(1, 6)]
    primes = analytics.prime_list(1000, big_tables)
    inv = [1.0 / p for p in primes.tolist()]
    e = analytics.elementary_from_power_sums(analytics.power_sums(primes, 3), 3)
    rel = max(abs(e[h] - analytics.elementary_direct(inv, h)) / analytics.elementary_direct(inv, h)
              for h in range(1, 4))
    elapsed = time.perf_counter() - t0
    ok = all(0.05 <= r <= 3 for r in ratios) and rel <= 1e-9 and elapsed <= 60
    record(6, "symmetric prime-reciprocal sums", ok,
           "ratios at x=1e6, h=1..5: " + ", ".join(f"{r:.4f}" for r in ratios)
           + f" (band [0.05, 3]); Newton vs subsets at x=1e3, h<=3: rel err {rel:.1e}; {elapsed:.1f}s")


def test_criterion_07_construction(big_tables):
    t0 = time.perf_counter()
    bijection_ok = True
    for k in range(1, 17):
        sets = construction.index_sets(k)
        top = 2**k - 1
        supports = {frozenset(i for i in range(k) if j in sets[i]) for j in range(1, top + 1)}
        bijection_ok &= len(supports) == top and frozenset() not in supports
        bijection_ok &= all(len(s) == 2 ** (k - 1) for s in sets)
    rng = random.Random(SEED)
    sample = set()
    while len(sample) < 100:
        n = 2 * rng.randrange(1, 5 * 10**5 + 1)
        if factor(n, big_tables).is_squarefree():
            sample.add(n)
    params = construction.params_for(10**6, 2, relaxed=True)
    n_reps = bad_reps = 0
    for n in sorted(sample):
        _, reps = construction.find_representations(n, params, 10**6, big_tables)
        for rep in reps:
            n_reps += 1
            q0, q1 = rep.q
            lam_ok = carmichael_lambda(q0 * q1, big_tables) == n
            if not (construction.verify_representation(rep, big_tables) and lam_ok):
                bad_reps += 1
    s = construction.empirical_s1_s2(10**4, 2, params, big_tables)
    cauchy = s.positive_count * s.S2 >= s.S1**2
    elapsed = time.perf_counter() - t0
    ok = bijection_ok and bad_reps == 0 and cauchy and elapsed <= 120
    record(7, "construction suite", ok,
           f"index sets k<=16 ok={bijection_ok}; {n_reps} representations of 100 seeded even "
           f"squarefree n<=1e6, {bad_reps} failing; s1s2(x=1e4,k=2): pos={s.positive_count}, "
           f"S1={s.S1}, S2={s.S2}, pos*S2>=S1^2 {cauchy}; {elapsed:.1f}s")


def test_criterion_08_dual_combinatorics():
    t0 = time.perf_counter()
    mismatched = [(k, m, w) for k in range(1, 5) for m in range(k + 1) for w in range(0, 7)
                  if construction.dual_count_formula(k, m, w) != construction.dual_count_bruteforce(k, m, w)]
    primes = [2, 3, 5, 7, 11, 13]
    violations = sum(construction.b_v_identity_violations(3, m, primes[:w])
                     for m in (1, 2) for w in range(0, 7))
    elapsed = time.perf_counter() - t0
    ok = not mismatched and violations == 0 and elapsed <= 60
    record(8, "dual-factorization combinatorics", ok,
           f"formula vs brute force over k<=4, m<=k, omega<=6: {len(mismatched)} mismatches; "
           f"B_v identity k=3, m in {{1,2}}, omega<=6 exhaustive: {violations} violations; {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_09_performance():
    base = json.loads(BASELINE.read_text())
    x = base["x"]
    source = PrimeSource.up_to(x + 1)
    timings = {}
    counts = {}
    for threads in (1, 8):
        best = math.inf
        for _ in range(2):  # best of two: wall clock on shared machines is noisy
            t0 = time.perf_counter()
            counts[threads] = count_up_to(x, workers=threads, source=source).last.v_lambda
            best = min(best, time.perf_counter() - t0)
        timings[threads] = best
    speedup = timings[1] / timings[8]
    limit = 2 * base["seconds_1_thread"]
    ok = counts[1] == counts[8] and timings[1] <= limit and timings[8] <= limit
    record(9, "performance (soft)", ok,
           f"x=1e8 on {available_cpus()} cpu(s), best of 2: 1 thread {timings[1]:.1f}s, 8 threads {timings[8]:.1f}s, "
           f"speedup {speedup:.2f}x (target 2.5x needs >=3 cores; reported only); "
           f"regression limit 2x baseline {base['seconds_1_thread']:.1f}s -> {limit:.1f}s; "
           f"5-minute budget {'met' if timings[1] <= 300 else 'missed'}")


def test_criterion_10_comparison_analytics():
    phi10 = analytics.phi_image_count(10)
    phi10_bf = analytics.phi_image_count_bruteforce(10, 2 * 10 * 10 + 2)
    mult4 = analytics.mult_table_count(4)
    mult4_bf = analytics.mult_table_count_bruteforce(4)
    ok = phi10 == phi10_bf == 6 and mult4 == mult4_bf == 9
    record(10, "comparison analytics", ok,
           f"V_phi(10)={phi10} (brute force {phi10_bf}); mult(4)={mult4} (brute force {mult4_bf})")
