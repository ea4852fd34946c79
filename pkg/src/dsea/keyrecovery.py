"""Known-plaintext recovery of the whole DSEA key from a single pair.

The pipeline is L -> initial_key -> PRBS -> x(0) -> mu.  Every step is a
vectorized pass over the pair, and a key is only reported after it
re-encrypts the known plaintext to the observed ciphertext.

Note on ``initial_key``: at a block start ``n``, ``g(n) ^ g'(n)`` is
``initial_key`` when ``b(n) = 1`` and its complement when ``b(n) = 0``.
A block start whose plain byte matches a mask only tells us that
``g'(n-1)`` equals that same value, so the pair alone never separates
``initial_key`` from its complement.  The two candidates are told apart by
whether the PRBS they imply comes from some (mu, x0).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chaos import Fixed8, MuFixed, PrecisionMode, Scheme, full_step_table, generate_prbs, step_table
from .cipher import SecretKey, as_bytes, first_mismatch
from .errors import (InconsistentPairError, InsufficientDataError, LengthMismatchError,
                     NoConsistentMuError)
from .maskattack import build_mask_texts, estimate_period_co

MU_WINDOW = 16
MIN_ATTACK_BYTES = 16


class Status(str, enum.Enum):
    SUCCESS = "SUCCESS"
    AMBIGUOUS = "AMBIGUOUS"
    INCONSISTENT_PAIR = "INCONSISTENT_PAIR"
    INSUFFICIENT_DATA = "INSUFFICIENT_DATA"


@dataclass(frozen=True)
class MuSearch:
    mu: MuFixed
    mu_tilde: float | None
    window: tuple[int, int] | None
    full_scan: bool


@dataclass
class AttackReport:
    status: Status
    recovered_key: SecretKey | None = None
    L_evidence: list = field(default_factory=list)
    L_tried: list = field(default_factory=list)
    key_candidates: tuple = ()
    key_note: str = ""
    prbs: np.ndarray | None = field(default=None, repr=False)
    mu_tilde: float | None = None
    mu_search_window: tuple[int, int] | None = None
    mu_full_scan: bool = False
    candidate_keys: list = field(default_factory=list)
    message: str = ""

    def to_text(self, max_evidence: int = 32) -> str:
        ev = self.L_evidence
        ev_text = ", ".join(str(p) for p in ev[:max_evidence]) + (" ..." if len(ev) > max_evidence else "")
        lines = [
            f"status: {self.status.value}",
            f"recovered_key: {self.recovered_key if self.recovered_key else 'ABSENT'}",
            f"mismatch_positions: {len(ev)} [{ev_text}]",
            f"L_tried: {', '.join(str(L) for L in self.L_tried)}",
            f"initial_key_candidates: {', '.join(str(k) for k in self.key_candidates)}",
            f"initial_key_note: {self.key_note}",
            f"mu_tilde: {'n/a' if self.mu_tilde is None else f'{self.mu_tilde:.6f}'}",
            f"mu_search_window: {'n/a' if self.mu_search_window is None else '%d..%d' % self.mu_search_window}",
            f"mu_full_scan: {'yes' if self.mu_full_scan else 'no'}",
            f"prbs_bits: {0 if self.prbs is None else self.prbs.size}",
        ]
        for key in self.candidate_keys:
            lines.append(f"candidate_key: {key}")
        if self.message:
            lines.append(f"message: {self.message}")
        return "\n".join(lines)


class _Pair:
    """A validated plaintext/ciphertext pair and its mask matches, computed once."""

    def __init__(self, plain, cipher):
        g = as_bytes(plain).ravel()
        c = as_bytes(cipher).ravel()
        if g.size != c.size:
            raise LengthMismatchError(f"plaintext has {g.size} bytes, ciphertext {c.size}")
        if g.size < 1:
            raise InsufficientDataError("empty pair")
        self.g, self.c, self.m = g, c, g.size
        masks = build_mask_texts(c)
        self.hit0 = g == masks.g0
        self.hit1 = g == masks.g1
        miss = ~(self.hit0 | self.hit1)
        miss[0] = False
        self.miss = miss
        self.pos = np.flatnonzero(miss)

    def key_candidates(self, L) -> set[int]:
        x = self.g[::L] ^ self.c[::L]
        v = x[0]
        if np.all((x == v) | (x == (v ^ 0xFF))):
            return {int(v), int(v) ^ 0xFF}
        return set()

    def prbs(self, L, initial_key) -> np.ndarray:
        bits = self.hit1.astype(np.uint8)
        ok = self.hit0 | self.hit1
        x = self.g[::L] ^ self.c[::L]
        bits[::L] = x == initial_key
        ok[::L] = (x == initial_key) | (x == (initial_key ^ 0xFF))
        bad = np.flatnonzero(~ok)
        if bad.size:
            n = int(bad[0])
            raise InconsistentPairError(f"byte {n} matches neither alternative", position=n)
        return bits


def enhanced_differential(plain, cipher) -> np.ndarray:
    """0 where the plain byte equals either mask, 255 elsewhere; 0 at n = 0."""
    pair = _Pair(plain, cipher)
    return np.where(pair.miss, 255, 0).astype(np.uint8).reshape(as_bytes(plain).shape)


def mismatch_positions(plain, cipher) -> np.ndarray:
    return _Pair(plain, cipher).pos


def _divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return sorted(small + large, reverse=True)


def _coverage(positions, L, m) -> float:
    multiples = (m - 1) // L
    return len(positions) / multiples if multiples else 1.0


def candidate_block_lengths(plain, cipher):
    """Yield block lengths consistent with the pair, most plausible first.

    Every mismatch sits at a block start, so L divides their gcd.  Divisors
    whose multiples are mostly mismatches come first; the others follow in
    case block starts matched a mask by chance.  With fewer than two
    mismatches the ciphertext-only estimate is tried, then a descending scan.
    """
    pair = plain if isinstance(plain, _Pair) else _Pair(plain, cipher)
    m, pos = pair.m, pair.pos
    npos = pos.size

    def ok(L):
        return 1 <= L <= m and not np.any(pos % L) and bool(pair.key_candidates(L))

    yielded = set()
    if npos >= 2:
        order = _divisors(int(np.gcd.reduce(pos)))
    elif npos == 1:
        order = _divisors(int(pos[0]))
    else:
        order = [m] + list(range(m - 1, 0, -1))
    if npos < 2 and m >= 64:
        try:
            est = estimate_period_co(pair.c, 2, min(256, (m - 1) // 3)).L_hat
        except ValueError:
            est = None
        if est is not None and ok(est):
            yielded.add(est)
            yield est
    covered = [L for L in order if _coverage(pos, L, m) >= 0.5]
    rest = [L for L in order if _coverage(pos, L, m) < 0.5]
    for L in covered + rest:
        if L not in yielded and ok(L):
            yielded.add(L)
            yield L


def recover_L(plain, cipher) -> int:
    for L in candidate_block_lengths(plain, cipher):
        return L
    raise InsufficientDataError("no block length is consistent with the pair")


def recover_initial_key(plain, cipher, L: int) -> tuple[int, ...]:
    """Candidates for initial_key given L: a value and its complement.

    Raises InconsistentPairError when the block starts disagree.
    """
    cands = _Pair(plain, cipher).key_candidates(L)
    if not cands:
        raise InconsistentPairError(f"block starts for L={L} imply no common initial_key")
    return tuple(sorted(cands))


def recover_prbs(plain, cipher, L: int, initial_key: int) -> np.ndarray:
    """The chaotic bits implied by the pair once L and initial_key are fixed."""
    return _Pair(plain, cipher).prbs(L, initial_key)


def recover_x0(prbs) -> Fixed8:
    bits = np.asarray(prbs, dtype=np.uint8)
    if bits.size < 8:
        raise InsufficientDataError("x(0) needs 8 bits")
    return Fixed8(int(np.packbits(bits[:8])[0]))


def bits_to_states(prbs) -> np.ndarray:
    """Numerators of the complete 8-bit states in a bit sequence."""
    bits = np.asarray(prbs, dtype=np.uint8)
    return np.packbits(bits[: bits.size - bits.size % 8])


def estimate_mu(prbs) -> float | None:
    """``x(k+1) / (x(k) (1 - x(k)))`` at the k with the largest usable x(k+1)."""
    s = bits_to_states(prbs).astype(np.int64)
    if s.size < 2:
        raise InsufficientDataError("mu estimation needs two complete states")
    nxt = np.where(s[:-1] > 0, s[1:], -1)
    k = int(np.argmax(nxt))
    if nxt[k] < 0:
        return None
    # x(k+1) / (x(k)(1 - x(k))) with x = s/256
    return float(Fraction(int(s[k + 1]) * 256, int(s[k]) * (256 - int(s[k]))))


def _mu_reproduces(mu, bits, states, mode, scheme) -> bool:
    if mode.is_fixed:
        table = step_table(mu, mode, scheme)
        if not np.array_equal(table[states[:-1]], states[1:]):
            return False
        rem = bits.size % 8
        if rem and states.size:
            tail = np.unpackbits(np.array([table[states[-1]]], dtype=np.uint8))[:rem]
            return np.array_equal(tail, bits[-rem:])
        return True
    return np.array_equal(generate_prbs(int(states[0]), mu, bits.size, mode, scheme), bits)


def consistent_mus(prbs, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> list[int]:
    """Every mu numerator whose orbit from x(0) reproduces all bits, ascending."""
    mode, scheme = PrecisionMode(mode), Scheme(scheme)
    bits = np.asarray(prbs, dtype=np.uint8)
    states = bits_to_states(bits)
    cand = np.arange(256)
    if mode.is_fixed and states.size >= 2:
        # prune with the first transitions, all mu at once
        head = states[: min(states.size, 9)]
        table = _table_cache(mode, scheme)
        cand = cand[(table[:, head[:-1]] == head[1:]).all(axis=1)]
    return [int(mu) for mu in cand if _mu_reproduces(int(mu), bits, states, mode, scheme)]


_TABLES = {}


def _table_cache(mode, scheme):
    if (mode, scheme) not in _TABLES:
        _TABLES[mode, scheme] = full_step_table(mode, scheme)
    return _TABLES[mode, scheme]


def search_mu(prbs, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
              window: int = MU_WINDOW) -> MuSearch:
    """Smallest mu numerator whose orbit from x(0) reproduces every bit.

    The window of +-``window`` numerators around the estimate is preferred;
    the result is flagged ``full_scan`` when only mu outside it fit.
    """
    mode, scheme = PrecisionMode(mode), Scheme(scheme)
    bits = np.asarray(prbs, dtype=np.uint8)
    if bits.size < 16:
        raise InsufficientDataError("mu recovery needs at least 16 bits")
    fits = consistent_mus(bits, mode, scheme)
    if not fits:
        raise NoConsistentMuError("no mu numerator reproduces the recovered PRBS")
    mu_tilde = estimate_mu(bits)
    win = None
    if mu_tilde is not None:
        centre = int(math.floor(mu_tilde * 64 + 0.5))
        win = (max(0, centre - window), min(255, centre + window))
        inside = [mu for mu in fits if win[0] <= mu <= win[1]]
        if inside:
            return MuSearch(MuFixed(inside[0]), mu_tilde, win, False)
    return MuSearch(MuFixed(fits[0]), mu_tilde, win, True)


def recover_mu(prbs, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> MuFixed:
    return search_mu(prbs, mode, scheme).mu


def full_known_plaintext_attack(plain, cipher, mode=PrecisionMode.FIXED8_TRUNC,
                                scheme=Scheme.FUSED) -> AttackReport:
    mode = PrecisionMode(mode)
    pair = _Pair(plain, cipher)
    g, c, m = pair.g, pair.c, pair.m
    if m < MIN_ATTACK_BYTES:
        return AttackReport(Status.INSUFFICIENT_DATA,
                            message=f"need at least {MIN_ATTACK_BYTES} bytes, got {m}")
    report = AttackReport(Status.INCONSISTENT_PAIR, L_evidence=pair.pos.tolist())
    for L in candidate_block_lengths(pair, None):
        report.L_tried.append(L)
        cands = tuple(sorted(pair.key_candidates(L)))
        found = []
        for ik in cands:
            try:
                bits = pair.prbs(L, ik)
                x0 = recover_x0(bits)
                ms = search_mu(bits, mode, scheme)
            except (InconsistentPairError, NoConsistentMuError):
                continue
            key = SecretKey(L, ik, ms.mu, x0)
            if first_mismatch(g, c, key, mode, scheme) is None:
                found.append((key, bits, ms))
        if not found:
            continue
        key, bits, ms = found[0]
        report.key_candidates = cands
        report.prbs = bits
        report.mu_tilde = ms.mu_tilde
        report.mu_search_window = ms.window
        report.mu_full_scan = ms.full_scan
        report.candidate_keys = [f[0] for f in found]
        # Survivors share L and every non-block-start bit and complement each
        # other at block starts, so they encrypt every M-byte message alike.
        report.status = Status.SUCCESS
        report.recovered_key = key
        if len(found) == 1:
            report.key_note = (f"complement pair; {key.initial_key} kept, the other "
                               f"implies a PRBS no (mu, x0) generates")
        else:
            report.key_note = (f"{len(found)} keys reproduce the pair and are equivalent "
                               f"on {m}-byte messages; first one kept")
        return report
    report.message = "no key reproduces the ciphertext"
    return report


@dataclass(frozen=True)
class BoundRow:
    n: int
    pairs: int
    violations: int
    max_error: float

    @property
    def bound(self) -> float:
        return 2.0 ** (self.n + 3) / 256

    @property
    def rate(self) -> float:
        return self.violations / self.pairs if self.pairs else 0.0


def mu_error_bound_sweep(mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> list[BoundRow]:
    """Check ``|mu~ - mu| < 2**(n+3) / 256`` whenever ``x(k+1) >= 2**-n``.

    Sweeps every state numerator x(k) in 1..255 and every mu numerator, with
    x(k+1) produced by the given arithmetic.
    """
    table = full_step_table(mode, scheme).astype(np.int64)  # [mu, x]
    mu = np.arange(256)[:, None] / 64.0
    x = np.arange(256)[None, :]
    usable = np.broadcast_to(x > 0, table.shape)
    denom = np.where(x > 0, x * (256 - x), 1)
    err = np.abs(table * 256 / denom - mu)
    rows = []
    for n in range(1, 9):
        sel = usable & (table >= 256 >> n)
        bound = 2.0 ** (n + 3) / 256
        e = err[sel]
        rows.append(BoundRow(n, int(sel.sum()), int(np.count_nonzero(e >= bound)),
                             float(e.max()) if e.size else 0.0))
    return rows


def format_bound_sweep(rows) -> str:
    lines = [f"{'n':>2} {'bound':>9} {'pairs':>7} {'violations':>11} {'rate':>9} {'max_err':>9}"]
    for r in rows:
        lines.append(f"{r.n:>2} {r.bound:>9.5f} {r.pairs:>7} {r.violations:>11} {r.rate:>9.5f} {r.max_error:>9.5f}")
    return "\n".join(lines)
