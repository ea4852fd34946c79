"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np
import pytest

from dsea.bruteforce import KeySpace, cost_model, search_with_summary
from dsea.chaos import PrecisionMode, detect_cycle, format_survey, survey_quantization
from dsea.cipher import REFERENCE_KEY, SecretKey, decrypt, encrypt
from dsea.errors import IterationCapExceededError
from dsea.keyrecovery import Status, format_bound_sweep, full_known_plaintext_attack, mu_error_bound_sweep
from dsea.maskattack import build_mask_texts, estimate_period_co
from dsea.synth import smooth_signal

MODES = list(PrecisionMode)


def random_key(rng, m, L_max=None):
    L = int(rng.integers(1, (L_max or m) + 1))
    return SecretKey(L, *rng.integers(0, 256, 3).tolist())


def test_1_round_trip(record):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    failures = 0
    for i in range(1000):
        m = int(rng.integers(16, 4097))
        key = random_key(rng, m)
        mode = MODES[i % 3]
        g = rng.integers(0, 256, m, dtype=np.uint8)
        failures += not np.array_equal(decrypt(encrypt(g, key, mode), key, mode), g)
    elapsed = time.perf_counter() - start
    ok = record(1, failures == 0 and elapsed < 10,
                f"round trip: 1000 cases, {failures} failures, {elapsed:.2f} s (limit 10 s)")
    assert ok


def test_2_theorem_exhaustive(record):
    start = time.perf_counter()
    bc = np.arange(65536, dtype=np.uint32)
    b = (bc >> 8).astype(np.uint8)
    c = (bc & 0xFF).astype(np.uint8)
    nb = ~b
    violations = 0
    for a in range(256):
        a8 = np.uint8(a)
        lhs = np.abs((a8 ^ b).astype(np.int16) - (b ^ c).astype(np.int16))
        rhs = np.abs((a8 ^ nb).astype(np.int16) - (nb ^ c).astype(np.int16))
        violations += int(np.count_nonzero(lhs != rhs))
    elapsed = time.perf_counter() - start
    ok = record(2, violations == 0 and elapsed < 60,
                f"theorem: 2^24 triples, {violations} violations, {elapsed:.2f} s (limit 60 s)")
    assert ok


def test_3_mask_partition(record):
    rng = np.random.default_rng(303)
    bad = 0
    for _ in range(100):
        m = int(rng.integers(16, 4097))
        key = random_key(rng, m, L_max=min(m, 300))
        g = rng.integers(0, 256, m, dtype=np.uint8) if rng.random() < 0.5 else smooth_signal(rng, m)
        c = encrypt(g, key)
        masks = build_mask_texts(c)
        n = np.arange(m)
        off = (n >= 1) & (n % key.L != 0)
        h0, h1 = g == masks.g0, g == masks.g1
        exactly_one = np.all(h0[off] ^ h1[off])
        total = int(np.count_nonzero(h0[1:]) + np.count_nonzero(h1[1:]))
        bad += not (exactly_one and total >= m - -(-m // key.L))
    ok = record(3, bad == 0, f"mask partition: 100 pairs, {bad} violating")
    assert ok


def test_4_known_plaintext(record):
    rng = np.random.default_rng(404)
    m = 4096
    cases = [(random_key(rng, m, L_max=64 if i % 2 else m), PrecisionMode.FIXED8_TRUNC)
             for i in range(100)]
    cases += [(random_key(rng, m, L_max=64), mode)
              for mode in (PrecisionMode.FIXED8_NEAREST, PrecisionMode.FLOAT64) for _ in range(10)]
    failures = []
    full_scans = 0
    for key, mode in cases:
        g = smooth_signal(rng, m)
        r = full_known_plaintext_attack(g, encrypt(g, key, mode), mode)
        other = smooth_signal(rng, m)
        if r.status is not Status.SUCCESS or not np.array_equal(
                decrypt(encrypt(other, key, mode), r.recovered_key, mode), other):
            failures.append((key, mode, r.status))
        full_scans += r.mu_full_scan
    ok = record(4, not failures,
                f"known plaintext: {len(cases)} keys at 4 KiB, {len(failures)} failures, "
                f"{full_scans} used the mu full scan")
    assert ok, failures[:5]


def test_5_linear_cost(record):
    rng = np.random.default_rng(505)
    key = SecretKey(15, 170, 251, 69)
    sizes = [2**12, 2**14, 2**16, 2**18]
    times = []
    for m in sizes:
        g = smooth_signal(rng, m)
        c = encrypt(g, key)
        assert full_known_plaintext_attack(g, c).status is Status.SUCCESS
        reps = max(3, 2**20 // m)
        best = np.inf
        for _ in range(reps):
            t = time.perf_counter()
            full_known_plaintext_attack(g, c)
            best = min(best, time.perf_counter() - t)
        times.append(best)
    slope = float(np.polyfit(np.log2(sizes), np.log2(times), 1)[0])
    ok = record(5, abs(slope - 1.0) <= 0.2,
                f"attack cost exponent {slope:.3f} (target 1.0 +- 0.2); times "
                + ", ".join(f"{t * 1e3:.2f} ms" for t in times))
    assert ok


def test_6_mu_bound(record):
    rows = mu_error_bound_sweep()
    record.report("mu estimator bound sweep (fixed8_trunc)", format_bound_sweep(rows))
    r1 = rows[0]
    ok = record(6, r1.pairs > 0,
                f"mu bound at x(k+1) >= 0.5: {r1.violations}/{r1.pairs} violations "
                f"(rate {r1.rate:.4f}), max error {r1.max_error:.4f} vs bound {r1.bound}; "
                "attack success gated by criterion 4")
    assert ok


@pytest.mark.parametrize("L", [8, 15, 32])
def test_7_ciphertext_only(record, L):
    rng = np.random.default_rng(700 + L)
    hits = 0
    for _ in range(100):
        key = SecretKey(L, *rng.integers(0, 256, 3).tolist())
        g = smooth_signal(rng, 4096)
        hits += estimate_period_co(encrypt(g, key), 2, 64).L_hat == L
    _L7[L] = hits
    if len(_L7) == 3:
        record(7, all(v >= 95 for v in _L7.values()),
               "ciphertext-only L: " + ", ".join(f"L={k}: {v}/100" for k, v in sorted(_L7.items()))
               + " (need >= 95)")
    assert hits >= 95


_L7 = {}


def test_8_cycles(record):
    rows = survey_quantization(69, 251)
    text = format_survey(rows)
    record.report("cycle survey for x0=69/256, mu=251/64", text)
    bounded = all(r.report.tail_length + r.report.period <= 256 for r in rows)
    reproducing = [f"{r.mode.value}/{r.scheme.value}" for r in rows if r.matches(8)]
    try:
        detect_cycle(69, 251, PrecisionMode.FLOAT64, cap=2**24)
        float_ok = False
    except IterationCapExceededError:
        float_ok = True
    ok = record(8, bounded and float_ok and "reproduced by" in text,
                f"cycles: all fixed variants bounded={bounded}; period 8 reproduced by "
                f"{', '.join(reproducing) or 'none'}; float64 no cycle within 2^24={float_ok}")
    assert ok


def test_9_brute_force(record):
    rng = np.random.default_rng(909)
    g = rng.integers(0, 256, 64, dtype=np.uint8)
    c = encrypt(g, REFERENCE_KEY)
    found, summary = search_with_summary(KeySpace(range(15, 16)), g, c)
    equivalent = all(np.array_equal(encrypt(g, k), c) for k in found)
    big = cost_model(65536)
    record.report("brute force cost summary (M=64, L known)", summary.to_text())
    record.report("cost model at M=65536", big.to_text())
    ok = record(9, REFERENCE_KEY in found and equivalent and summary.elapsed < 600
                and summary.model_log2 == 36 and big.claimed_log2 == 65552,
                f"brute force: {summary.keys_tested} keys in {summary.elapsed:.2f} s, "
                f"{len(found)} match(es), true key found={REFERENCE_KEY in found}; "
                f"model 2^{big.model_log2:.0f} vs claimed 2^{big.claimed_log2:.0f} at M=65536")
    assert ok
