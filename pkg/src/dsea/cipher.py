"""DSEA encryption and decryption.

Byte sequences are numpy ``uint8`` arrays.  A 2-D array is an image of
shape ``(height, width)`` and is processed in raster order; the output keeps
the input's shape.

For byte ``n`` the masking byte ``true_key`` is ``initial_key`` at block
starts (``n % L == 0``) and the previous cipher-byte otherwise; it is used
as is when the chaotic bit ``b(n)`` is 1 and complemented when it is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chaos import (Fixed8, MuFixed, PrecisionMode, Scheme, generate_prbs, logistic_step,
                    mu_real, step_table, x_real)
from .errors import KeyIncompatibleError, LengthMismatchError


@dataclass(frozen=True)
class SecretKey:
    """The four DSEA sub-keys.

    ``mu`` and ``x0`` are stored as numerators: mu = mu/64, x(0) = x0/256.
    """

    L: int
    initial_key: int
    mu: MuFixed
    x0: Fixed8

    def __post_init__(self):
        if int(self.L) < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if not 0 <= int(self.initial_key) <= 255:
            raise ValueError(f"initial_key out of range: {self.initial_key}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "initial_key", int(self.initial_key))
        object.__setattr__(self, "mu", MuFixed(self.mu))
        object.__setattr__(self, "x0", Fixed8(self.x0))

    def __str__(self):
        return (f"L={self.L} initial_key={self.initial_key} "
                f"mu={int(self.mu)}/64 x0={int(self.x0)}/256")


REFERENCE_KEY = SecretKey(L=15, initial_key=170, mu=251, x0=69)


def as_bytes(seq) -> np.ndarray:
    """Coerce bytes, lists or arrays to a uint8 array without copying arrays."""
    if isinstance(seq, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(seq), dtype=np.uint8)
    arr = np.asarray(seq)
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("byte values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def keystream_bits(key: SecretKey, nbytes: int, mode=PrecisionMode.FIXED8_TRUNC,
                   scheme=Scheme.FUSED) -> np.ndarray:
    """One chaotic bit per message byte."""
    return generate_prbs(key.x0, key.mu, nbytes, mode, scheme)


def _check(key: SecretKey, m: int):
    if m < 1:
        raise ValueError("message must contain at least one byte")
    if key.L > m:
        raise KeyIncompatibleError(f"L={key.L} exceeds message length M={m}")


def encrypt(plain, key: SecretKey, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
            bits=None) -> np.ndarray:
    """Encrypt ``plain``; ``bits`` overrides the chaotic PRBS when given."""
    arr = as_bytes(plain)
    g = arr.ravel()
    m = g.size
    _check(key, m)
    b = keystream_bits(key, m, mode, scheme) if bits is None else as_bytes(bits)[:m]
    # Within a block the chain unrolls to g'(n) = initial_key ^ h(s) ^ ... ^ h(n)
    h = g ^ np.where(b == 1, 0, 255).astype(np.uint8)
    run = np.bitwise_xor.accumulate(h)
    before = np.concatenate(([0], run[:-1])).astype(np.uint8)
    out = np.uint8(key.initial_key) ^ run ^ np.repeat(before[:: key.L], key.L)[:m]
    return out.astype(np.uint8).reshape(arr.shape)


def decrypt(cipher, key: SecretKey, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
            bits=None) -> np.ndarray:
    arr = as_bytes(cipher)
    c = arr.ravel()
    m = c.size
    _check(key, m)
    b = keystream_bits(key, m, mode, scheme) if bits is None else as_bytes(bits)[:m]
    # chain on the received cipher-bytes, never on recovered plaintext
    true_key = np.concatenate(([0], c[:-1])).astype(np.uint8)
    true_key[:: key.L] = key.initial_key
    out = c ^ true_key ^ np.where(b == 1, 0, 255).astype(np.uint8)
    return out.astype(np.uint8).reshape(arr.shape)


def first_mismatch(plain, cipher, key: SecretKey, mode=PrecisionMode.FIXED8_TRUNC,
                   scheme=Scheme.FUSED) -> int | None:
    """Index of the first byte where ``encrypt(plain, key)`` differs from ``cipher``.

    A single forward pass with O(1) state that stops at the first
    disagreement; ``None`` means the whole ciphertext is reproduced.
    """
    g = as_bytes(plain).ravel()
    c = as_bytes(cipher).ravel()
    if g.size != c.size:
        raise LengthMismatchError(f"plaintext has {g.size} bytes, ciphertext {c.size}")
    m = g.size
    _check(key, m)
    mode = PrecisionMode(mode)
    L, ik = key.L, key.initial_key
    fixed = mode.is_fixed
    if fixed:
        table = step_table(key.mu, mode, scheme).tolist()
        x = state = int(key.x0)
    else:
        mu, x = mu_real(key.mu), x_real(key.x0)
        state = int(key.x0)
    prev = 0
    for n, (pb, cb) in enumerate(zip(g.tolist(), c.tolist())):
        phase = n & 7
        if n and not phase:
            if fixed:
                x = state = table[x]
            else:
                x = mu * x * (1.0 - x)
                state = min(max(int(x * 256.0), 0), 255)
        tk = prev if n % L else ik
        if not (state >> (7 - phase)) & 1:
            tk ^= 0xFF
        if pb ^ tk != cb:
            return n
        prev = cb
    return None


class DSEAStream:
    """Incremental encryptor/decryptor with O(1) state.

    Feed chunks through :meth:`update`; the concatenated output equals a
    one-shot :func:`encrypt` (or :func:`decrypt`) of the concatenated input.
    The L <= M check is left to the caller since M is unknown up front.
    """

    def __init__(self, key: SecretKey, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
                 decrypt: bool = False):
        self.key = key
        self.mode = PrecisionMode(mode)
        self.scheme = Scheme(scheme)
        self.decrypting = decrypt
        self.n = 0
        self._prev_cipher = 0
        self._mu = mu_real(key.mu)
        self._state = int(key.x0) if self.mode.is_fixed else x_real(key.x0)
        self._state_byte = int(key.x0)

    def _advance(self):
        if self.mode.is_fixed:
            self._state = int(logistic_step(self._state, self.key.mu, self.mode, self.scheme))
            self._state_byte = self._state
        else:
            x = self._state
            self._state = self._mu * x * (1.0 - x)
            self._state_byte = min(max(int(self._state * 256.0), 0), 255)

    def update(self, chunk) -> bytes:
        out = bytearray()
        for byte in bytes(as_bytes(chunk).ravel()):
            if self.n and self.n % 8 == 0:
                self._advance()
            bit = (self._state_byte >> (7 - self.n % 8)) & 1
            tk = self.key.initial_key if self.n % self.key.L == 0 else self._prev_cipher
            if not bit:
                tk ^= 0xFF
            res = byte ^ tk
            self._prev_cipher = byte if self.decrypting else res
            out.append(res)
            self.n += 1
        return bytes(out)
