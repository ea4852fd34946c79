"""Ciphertext-only analysis: mask texts, differential images and the block length.

Off block starts every plaintext byte equals one of two masks computable
from the ciphertext alone.  At block starts neither mask matches (except by
chance), and for correlated plaintexts those positions show up as a
periodic ridge in the differential of either mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cipher import as_bytes
from .errors import SignalTooShortError


@dataclass(frozen=True)
class MaskPair:
    g0: np.ndarray
    g1: np.ndarray


@dataclass(frozen=True)
class PeriodEstimate:
    """Result of :func:`estimate_period_co`.

    Candidates are ranked by ``score``, a two-sample z-statistic contrasting
    the differential at multiples of L with the rest of the sequence.
    ``ratio`` is the plain mean ratio (multiples over everything).
    ``runner_up`` is the best candidate that is not a multiple of ``L_hat``.
    Under uncorrelated plaintext all scores look like draws from N(0, 1).
    """

    L_hat: int
    score: float
    ratio: float
    runner_up: int
    runner_up_score: float
    runner_up_ratio: float
    scores: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def margin(self) -> float:
        return self.score - self.runner_up_score

    def to_text(self) -> str:
        return "\n".join([
            f"L_hat={self.L_hat}",
            f"score={self.score:.6f}",
            f"ratio={self.ratio:.6f}",
            f"runner_up={self.runner_up}",
            f"runner_up_score={self.runner_up_score:.6f}",
            f"runner_up_ratio={self.runner_up_ratio:.6f}",
            f"margin={self.margin:.6f}",
        ])


def build_mask_texts(cipher) -> MaskPair:
    arr = as_bytes(cipher)
    c = arr.ravel()
    if c.size < 1:
        raise ValueError("ciphertext must contain at least one byte")
    g1 = np.zeros_like(c)
    g1[1:] = c[1:] ^ c[:-1]
    g0 = g1 ^ np.uint8(0xFF)
    g0[0] = 0
    return MaskPair(g0.reshape(arr.shape), g1.reshape(arr.shape))


def differential(seq) -> np.ndarray:
    """``d(0) = g(0)`` and ``d(n) = |g(n) - g(n-1)|`` in raster order."""
    arr = as_bytes(seq)
    g = arr.ravel().astype(np.int16)
    if g.size < 1:
        raise ValueError("sequence must contain at least one byte")
    d = np.empty_like(g)
    d[0] = g[0]
    d[1:] = np.abs(np.diff(g))
    return d.astype(np.uint8).reshape(arr.shape)


def mask_match_counts(plain, cipher) -> tuple[int, int]:
    """How many plaintext bytes each mask reproduces, position 0 excluded."""
    g = as_bytes(plain).ravel()
    masks = build_mask_texts(cipher)
    g0, g1 = masks.g0.ravel(), masks.g1.ravel()
    if g.size != g0.size:
        raise ValueError("plaintext and ciphertext lengths differ")
    return int(np.count_nonzero(g[1:] == g0[1:])), int(np.count_nonzero(g[1:] == g1[1:]))


def folded_differential(seq) -> np.ndarray:
    """Differential that ignores complementing either neighbour.

    ``d(n) = min(|g(n) - g(n-1)|, |g(n) - (255 - g(n-1))|)``.  Off block starts
    a mask byte is the plain byte or its complement, so this recovers the
    plain-image smoothness however the chaotic bits fall.
    """
    arr = as_bytes(seq)
    g = arr.ravel().astype(np.int16)
    if g.size < 1:
        raise ValueError("sequence must contain at least one byte")
    d = np.empty_like(g)
    d[0] = g[0]
    d[1:] = np.minimum(np.abs(g[1:] - g[:-1]), np.abs(g[1:] - (255 - g[:-1])))
    return d.astype(np.uint8).reshape(arr.shape)


STATISTICS = {"folded": folded_differential, "differential": differential}


def _mask_statistic(cipher, statistic):
    d = STATISTICS[statistic](build_mask_texts(cipher).g0).ravel().astype(np.float64)
    return d


def _check_range(m, L_min, L_max):
    if not 2 <= L_min <= L_max < m:
        raise ValueError(f"need 2 <= L_min <= L_max < M, got {L_min}, {L_max}, M={m}")
    if (m - 1) // L_max < 2:
        raise SignalTooShortError(f"fewer than two multiples of L_max={L_max} in {m} bytes")


def period_ratios(cipher, L_min: int, L_max: int, statistic: str = "folded") -> dict[int, float]:
    """Mean differential at multiples of each L, relative to the mean over n >= 1."""
    d = _mask_statistic(cipher, statistic)
    _check_range(d.size, L_min, L_max)
    overall = d[1:].mean()
    if overall == 0:
        return {L: 1.0 for L in range(L_min, L_max + 1)}
    return {L: float(d[L::L].mean() / overall) for L in range(L_min, L_max + 1)}


def period_scores(cipher, L_min: int, L_max: int, statistic: str = "folded") -> dict[int, float]:
    """Welch z-statistic of the differential at multiples of L against the rest."""
    d = _mask_statistic(cipher, statistic)
    _check_range(d.size, L_min, L_max)
    d = d[1:]
    n_all, s_all, q_all = d.size, d.sum(), (d * d).sum()
    scores = {}
    for L in range(L_min, L_max + 1):
        hit = d[L - 1::L]
        k, r = hit.size, n_all - hit.size
        mean_rest = (s_all - hit.sum()) / r
        var_rest = max((q_all - (hit * hit).sum()) / r - mean_rest**2, 0.0)
        se = np.sqrt(hit.var() / k + var_rest / r)
        diff = hit.mean() - mean_rest
        scores[L] = float(diff / se) if se > 0 else (0.0 if diff == 0 else float(np.sign(diff)) * np.inf)
    return scores


def estimate_period_co(cipher, L_min: int = 2, L_max: int | None = None,
                       statistic: str = "folded") -> PeriodEstimate:
    """Estimate L from one ciphertext of a correlated plaintext.

    Multiples of the true L keep its mean but have fewer samples, divisors
    dilute it; both lower the z-statistic, so the argmax is taken directly
    (ties go to the smaller L).

    ``statistic="differential"`` scores the plain mask differential.  It is
    fooled by short PRBS cycles, since the chaotic bits then decide
    periodically whether a mask byte is the plain byte or its complement.
    Block lengths below 3 are not detectable: every off-block byte then
    neighbours a random block-start byte.
    """
    m = as_bytes(cipher).size
    if L_max is None:
        L_max = min(256, (m - 1) // 2)
    scores = period_scores(cipher, L_min, L_max, statistic)
    ratios = period_ratios(cipher, L_min, L_max, statistic)
    L_hat = max(scores, key=lambda L: (scores[L], -L))
    others = [L for L in scores if L % L_hat]
    runner_up = max(others, key=lambda L: (scores[L], -L)) if others else L_hat
    return PeriodEstimate(L_hat, scores[L_hat], ratios[L_hat],
                          runner_up, scores[runner_up], ratios[runner_up], scores)
