"""Exhaustive key search over a box of sub-key ranges.

Keys are enumerated L first, then initial_key, mu, x0.  For each
(L, initial_key) all (mu, x0) combinations are checked together, one
plaintext byte at a time, and combinations drop out at their first wrong
cipher-byte, the same short-circuit :func:`verify_key` applies to a single
key.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import PrecisionMode, Scheme, full_step_table
from .cipher import SecretKey, as_bytes, first_mismatch
from .errors import BudgetExceededError, LengthMismatchError

DEFAULT_BUDGET = 2**28


@dataclass(frozen=True)
class KeySpace:
    L_range: range
    key_range: range = range(256)
    mu_range: range = range(256)
    x0_range: range = range(256)

    def __post_init__(self):
        for name, lo, hi in (("L_range", 1, None), ("key_range", 0, 255),
                             ("mu_range", 0, 255), ("x0_range", 0, 255)):
            r = getattr(self, name)
            if not isinstance(r, range) or r.step != 1:
                raise ValueError(f"{name} must be a contiguous range")
            if len(r) == 0:
                raise ValueError(f"{name} is empty")
            if r.start < lo or (hi is not None and r.stop - 1 > hi):
                raise ValueError(f"{name} out of bounds: {r}")

    @property
    def size(self) -> int:
        return len(self.L_range) * len(self.key_range) * len(self.mu_range) * len(self.x0_range)

    def __contains__(self, key: SecretKey) -> bool:
        return (key.L in self.L_range and key.initial_key in self.key_range
                and key.mu in self.mu_range and key.x0 in self.x0_range)

    def split(self, parts: int) -> list["KeySpace"]:
        """Disjoint contiguous sub-spaces, in enumeration order.

        The outermost range with at least ``parts`` values is cut; concatenating
        the sub-searches' results reproduces the whole search.
        """
        names = ("L_range", "key_range", "mu_range", "x0_range")
        for name in names:
            r = getattr(self, name)
            if len(r) >= parts:
                break
        else:
            name = max(names, key=lambda n: len(getattr(self, n)))
            r = getattr(self, name)
            parts = len(r)
        bounds = np.linspace(r.start, r.stop, parts + 1).round().astype(int)
        fields = {n: getattr(self, n) for n in names}
        out = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            fields[name] = range(int(lo), int(hi))
            out.append(KeySpace(**fields))
        return out


@dataclass(frozen=True)
class CostSummary:
    space_size: int
    keys_tested: int
    matches: int
    elapsed: float
    message_length: int

    @property
    def full_space_size(self) -> int:
        return self.message_length * 2**24

    @property
    def model_log2(self) -> float:
        return 24 + 2 * math.log2(self.message_length)

    @property
    def claimed_log2(self) -> float:
        return self.message_length + math.log2(self.message_length)

    @property
    def extrapolated_seconds(self) -> float:
        if not self.keys_tested:
            return float("nan")
        return self.elapsed / self.keys_tested * self.full_space_size

    def to_text(self) -> str:
        return "\n".join([
            f"message_length: {self.message_length}",
            f"space_size: {self.space_size}",
            f"keys_tested: {self.keys_tested}",
            f"matches: {self.matches}",
            f"elapsed_seconds: {self.elapsed:.3f}",
            f"full_space_size: {self.full_space_size} (M * 2^24)",
            f"extrapolated_full_space_seconds: {self.extrapolated_seconds:.3e}",
            f"cost_model: O(2^24 * M^2) = 2^{self.model_log2:.2f}",
            f"claimed_cost: O(2^M * M) = 2^{self.claimed_log2:.2f}",
            f"claimed_over_model: 2^{self.claimed_log2 - self.model_log2:.2f}",
        ])


def verify_key(candidate: SecretKey, plain, cipher, mode=PrecisionMode.FIXED8_TRUNC,
               scheme=Scheme.FUSED) -> bool:
    """True iff ``candidate`` encrypts ``plain`` to ``cipher``; stops at the first bad byte."""
    if as_bytes(plain).size != as_bytes(cipher).size:
        raise LengthMismatchError("plaintext and ciphertext lengths differ")
    if candidate.L > as_bytes(plain).size:
        return False
    return first_mismatch(plain, cipher, candidate, mode, scheme) is None


def _sweep_L_key(g, c, L, ik, mus, x0s, mode, scheme, table):
    """Surviving (mu, x0) index arrays for one (L, initial_key)."""
    idx = np.arange(mus.size)
    mu = mus
    if mode.is_fixed:
        state = x0s.astype(np.intp)
        byte = state
    else:
        mu_f = mus / 64.0
        state = x0s / 256.0
        byte = x0s.astype(np.intp)
    for n in range(g.size):
        phase = n & 7
        if n and not phase:
            if mode.is_fixed:
                state = table[mu, state].astype(np.intp)
                byte = state
            else:
                state = mu_f * state * (1.0 - state)
                byte = np.clip(np.floor(state * 256.0), 0, 255).astype(np.intp)
        tk = int(c[n - 1]) if n % L else ik
        x = int(g[n]) ^ int(c[n])
        if x == tk:
            want = 1
        elif x == tk ^ 0xFF:
            want = 0
        else:
            return idx[:0]
        keep = ((byte >> (7 - phase)) & 1) == want
        if not keep.all():
            idx, mu, state, byte = idx[keep], mu[keep], state[keep], byte[keep]
            if not mode.is_fixed:
                mu_f = mu_f[keep]
            if not idx.size:
                break
    return idx


def _search_serial(space: KeySpace, g, c, mode, scheme) -> list[SecretKey]:
    table = full_step_table(mode, scheme) if mode.is_fixed else None
    mu_grid, x0_grid = np.meshgrid(np.array(space.mu_range), np.array(space.x0_range), indexing="ij")
    mus, x0s = mu_grid.ravel(), x0_grid.ravel()
    found = []
    for L in space.L_range:
        if L > g.size:
            continue
        for ik in space.key_range:
            for i in _sweep_L_key(g, c, L, ik, mus, x0s, mode, scheme, table).tolist():
                found.append(SecretKey(L, ik, int(mus[i]), int(x0s[i])))
    return found


def _search_part(args):
    space, g, c, mode, scheme = args
    return _search_serial(space, g, c, mode, scheme)


def search(space: KeySpace, plain, cipher, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
           budget: int = DEFAULT_BUDGET, workers: int = 1) -> list[SecretKey]:
    """Every key in ``space`` that encrypts ``plain`` to ``cipher``, in enumeration order."""
    return search_with_summary(space, plain, cipher, mode, scheme, budget, workers)[0]


def search_with_summary(space: KeySpace, plain, cipher, mode=PrecisionMode.FIXED8_TRUNC,
                        scheme=Scheme.FUSED, budget: int = DEFAULT_BUDGET,
                        workers: int = 1) -> tuple[list[SecretKey], CostSummary]:
    g = as_bytes(plain).ravel()
    c = as_bytes(cipher).ravel()
    if g.size != c.size:
        raise LengthMismatchError("plaintext and ciphertext lengths differ")
    if space.size > budget:
        raise BudgetExceededError(f"key space of {space.size} exceeds budget {budget}")
    mode, scheme = PrecisionMode(mode), Scheme(scheme)
    start = time.perf_counter()
    if workers > 1:
        parts = space.split(workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = pool.map(_search_part, [(p, g, c, mode, scheme) for p in parts])
            found = [k for chunk in chunks for k in chunk]
        found.sort(key=lambda k: (k.L, k.initial_key, k.mu, k.x0))
    else:
        found = _search_serial(space, g, c, mode, scheme)
    elapsed = time.perf_counter() - start
    summary = CostSummary(space.size, space.size, len(found), elapsed, g.size)
    return found, summary


def cost_model(message_length: int) -> CostSummary:
    """The cost accounting for a message length without running anything."""
    return CostSummary(0, 0, 0, 0.0, message_length)
