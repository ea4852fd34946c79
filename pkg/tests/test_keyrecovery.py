from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsea.chaos import PrecisionMode, generate_prbs
from dsea.cipher import REFERENCE_KEY, SecretKey, decrypt, encrypt
from dsea.errors import InconsistentPairError, InsufficientDataError, NoConsistentMuError
from dsea.keyrecovery import (
    MU_WINDOW, Status, candidate_block_lengths, consistent_mus, enhanced_differential,
    estimate_mu, format_bound_sweep, full_known_plaintext_attack, mismatch_positions,
    mu_error_bound_sweep, recover_initial_key, recover_L, recover_mu, recover_prbs, recover_x0,
    search_mu,
)
from dsea.synth import smooth_image, smooth_signal


@pytest.fixture(scope="module")
def reference_pair():
    img = smooth_image()
    return img, encrypt(img, REFERENCE_KEY)


def test_enhanced_differential_on_pair(reference_pair):
    g, c = reference_pair
    e = enhanced_differential(g, c)
    assert e.shape == g.shape
    n = np.flatnonzero(e.ravel())
    assert n.size > 0 and np.all(n % 15 == 0)
    assert set(np.unique(e).tolist()) == {0, 255}


def test_enhanced_differential_on_noise():
    g = np.random.default_rng(0).integers(0, 256, 8192, dtype=np.uint8)
    frac = np.count_nonzero(enhanced_differential(g, g)) / g.size
    assert abs(frac - 254 / 256) < 0.01


def test_reference_pair_pipeline(reference_pair):
    g, c = reference_pair
    assert recover_L(g, c) == 15
    assert recover_initial_key(g, c, 15) == (85, 170)
    bits = recover_prbs(g, c, 15, 170)
    assert np.array_equal(bits, generate_prbs(69, 251, g.size))
    assert recover_x0(bits) == 69
    assert recover_mu(bits) == 251
    with pytest.raises(NoConsistentMuError):
        search_mu(recover_prbs(g, c, 15, 85))


def test_gcd_of_mismatches():
    rng = np.random.default_rng(5)
    g = rng.integers(0, 256, 90, dtype=np.uint8)
    c = encrypt(g, SecretKey(15, 9, 240, 101))
    pos = mismatch_positions(g, c)
    assert np.gcd.reduce(pos) == 15
    assert recover_L(g, c) == 15


def _coincidence_pair(complement: bool):
    # force chance mask matches at block starts 15 and 45 so that only 30, 60 mismatch
    g = smooth_signal(np.random.default_rng(0), 70)
    for n in (14, 44):
        c = encrypt(g, REFERENCE_KEY)
        g[n] ^= c[n] ^ REFERENCE_KEY.initial_key ^ (0xFF if complement else 0)
    c = encrypt(g, REFERENCE_KEY)
    assert mismatch_positions(g, c).tolist() == [30, 60]
    return g, c


def test_divisor_fallback_after_rejection():
    g, c = _coincidence_pair(complement=True)
    assert list(candidate_block_lengths(g, c)) == [30, 15]
    r = full_known_plaintext_attack(g, c)
    assert r.status is Status.SUCCESS
    assert r.L_tried == [30, 15]
    assert r.recovered_key == REFERENCE_KEY


def test_equivalent_longer_block_accepted():
    # here c(14) == initial_key, so L=30 encrypts this message exactly like L=15
    g, c = _coincidence_pair(complement=False)
    r = full_known_plaintext_attack(g, c)
    assert r.status is Status.SUCCESS
    assert r.recovered_key.L == 30
    assert np.array_equal(encrypt(g, r.recovered_key), c)


def test_initial_key_block_start_value():
    # whenever g(n) = g1(n) at a block start, g'(n-1) is one of the two candidates
    g = np.random.default_rng(1).integers(0, 256, 65536, dtype=np.uint8)
    c = encrypt(g, REFERENCE_KEY)
    starts = np.arange(15, g.size, 15)
    g1 = c[starts] ^ c[starts - 1]
    hit = starts[g[starts] == g1]
    assert hit.size > 10
    assert set(c[hit - 1].tolist()) == {85, 170}


def test_initial_key_inconsistent():
    g = np.arange(64, dtype=np.uint8)
    c = encrypt(g, REFERENCE_KEY)
    c2 = c.copy()
    c2[30] ^= 0x0F
    with pytest.raises(InconsistentPairError):
        recover_initial_key(g, c2, 15)


def test_single_block_gives_pair():
    g = np.arange(20, dtype=np.uint8)
    c = encrypt(g, SecretKey(20, 77, 251, 69))
    assert recover_initial_key(g, c, 20) == (77, 77 ^ 0xFF)


@given(st.integers(0, 2**32 - 1), st.integers(16, 300))
@settings(max_examples=40)
def test_corrupted_byte_detected(seed, m):
    rng = np.random.default_rng(seed)
    g = rng.integers(0, 256, m, dtype=np.uint8)
    key = SecretKey(int(rng.integers(2, 9)), *rng.integers(0, 256, 3).tolist())
    c = encrypt(g, key)
    bits = recover_prbs(g, c, key.L, key.initial_key)
    assert np.array_equal(bits, generate_prbs(key.x0, key.mu, m))
    n = int(rng.integers(1, m))
    if n % key.L == 0:
        n = n - 1 if n > 1 else n + 1
    bad = c.copy()
    bad[n] ^= 0x5A
    with pytest.raises(InconsistentPairError) as exc:
        recover_prbs(g, bad, key.L, key.initial_key)
    assert exc.value.position >= n


def test_corrupted_pair_report():
    g = smooth_signal(np.random.default_rng(2), 512)
    c = encrypt(g, REFERENCE_KEY)
    c[200] ^= 0x33
    assert full_known_plaintext_attack(g, c).status is Status.INCONSISTENT_PAIR


def test_x0_examples():
    assert recover_x0([0, 1, 0, 0, 0, 1, 0, 1]) == 69
    assert recover_x0([0] * 8) == 0
    assert recover_x0([1] * 8) == 255
    with pytest.raises(InsufficientDataError):
        recover_x0([1, 0, 1])


def test_mu_estimate_example():
    bits = np.unpackbits(np.array([69, 197], np.uint8))
    mt = estimate_mu(bits)
    assert Fraction(mt).limit_denominator(20000) == Fraction(50432, 12903)
    assert abs(mt - 3.9086) < 1e-4
    assert abs(mt - 251 / 64) < 2**4 * 2**-8


def test_mu_zero_orbit_full_scan():
    bits = np.zeros(64, np.uint8)
    assert estimate_mu(bits) is None
    ms = search_mu(bits)
    assert ms.full_scan and ms.mu == 0


@given(st.integers(0, 255), st.integers(0, 255), st.sampled_from(list(PrecisionMode)))
@settings(max_examples=80)
def test_mu_search_finds_consistent(x0, mu, mode):
    bits = generate_prbs(x0, mu, 256, mode)
    fits = consistent_mus(bits, mode)
    assert mu in fits
    got = search_mu(bits, mode).mu
    assert np.array_equal(generate_prbs(x0, got, 256, mode), bits)


def test_mu_window_prefers_estimate():
    ms = search_mu(generate_prbs(69, 251, 4096))
    assert ms.mu == 251 and not ms.full_scan
    assert ms.window[0] <= 251 <= ms.window[1]
    assert ms.window[1] - ms.window[0] <= 2 * MU_WINDOW


def test_attack_too_short():
    g = np.arange(12, dtype=np.uint8)
    assert full_known_plaintext_attack(g, encrypt(g, SecretKey(3, 1, 250, 9))).status \
        is Status.INSUFFICIENT_DATA


@given(st.integers(0, 2**32 - 1), st.sampled_from(list(PrecisionMode)))
@settings(max_examples=30, deadline=None)
def test_attack_round_trip(seed, mode):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(256, 2048))
    key = SecretKey(int(rng.integers(1, 100)), *rng.integers(0, 256, 3).tolist())
    g = smooth_signal(rng, m)
    r = full_known_plaintext_attack(g, encrypt(g, key, mode), mode)
    assert r.status is Status.SUCCESS
    other = rng.integers(0, 256, m, dtype=np.uint8)
    assert np.array_equal(decrypt(encrypt(other, key, mode), r.recovered_key, mode), other)


def test_degenerate_orbit_equivalent_keys():
    # x0 = 0 never leaves 0: initial_key and its complement give the same cipher
    # only with the bits flipped, so both survive and are interchangeable
    g = smooth_signal(np.random.default_rng(4), 600)
    key = SecretKey(10, 3, 200, 0)
    c = encrypt(g, key)
    r = full_known_plaintext_attack(g, c)
    assert r.status is Status.SUCCESS
    assert np.array_equal(encrypt(g, r.recovered_key), c)
    for k in r.candidate_keys:
        assert np.array_equal(encrypt(g, k), c)


def test_report_text_stable(reference_pair):
    g, c = reference_pair
    t = full_known_plaintext_attack(g, c).to_text()
    lines = t.splitlines()
    assert lines[0] == "status: SUCCESS"
    assert lines[1] == "recovered_key: L=15 initial_key=170 mu=251/64 x0=69/256"
    assert t == full_known_plaintext_attack(g, c).to_text()


def test_bound_sweep():
    rows = mu_error_bound_sweep()
    assert [r.n for r in rows] == list(range(1, 9))
    r1 = rows[0]
    assert r1.bound == 2**4 * 2**-8
    # frozen from an exhaustive exact-rational sweep
    assert r1.violations == 0 and r1.pairs == 17372
    assert all(r.violations == 0 for r in rows)
    assert "violations" in format_bound_sweep(rows)


def test_bound_sweep_matches_rational_oracle():
    from dsea.chaos import full_step_table
    t = full_step_table()
    worst = Fraction(0)
    count = 0
    for mu in range(256):
        for x in range(1, 256):
            y = int(t[mu, x])
            if y >= 128:
                count += 1
                err = abs(Fraction(y * 256, x * (256 - x)) - Fraction(mu, 64))
                worst = max(worst, err)
    r1 = mu_error_bound_sweep()[0]
    assert count == r1.pairs
    assert float(worst) == pytest.approx(r1.max_error, rel=1e-12)
    assert worst < Fraction(1, 16)
