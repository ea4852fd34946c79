"""Finite-precision Logistic map, the chaotic PRBS built on it, and orbit cycles.

States live on an 8-bit fraction grid (``x = num / 2**8``) and the control
parameter on a 6-bit one (``mu = num / 2**6``), so both sub-keys are single
bytes.  ``FLOAT64`` runs the same map in double precision from the same
quantized key.

In the fixed-point modes the default ``Scheme.FUSED`` evaluates
``mu * x * (1 - x)`` exactly in integers and quantizes once.  The other
schemes quantize an intermediate product and exist only for the cycle
survey (see :func:`survey_quantization`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import IterationCapExceededError

X_FRAC_BITS = 8
MU_FRAC_BITS = 6
FLOAT64_CYCLE_CAP = 2**24


class PrecisionMode(str, enum.Enum):
    FIXED8_TRUNC = "fixed8_trunc"
    FIXED8_NEAREST = "fixed8_nearest"
    FLOAT64 = "float64"

    @property
    def is_fixed(self) -> bool:
        return self is not PrecisionMode.FLOAT64


class Scheme(str, enum.Enum):
    """Where the fixed-point quantization happens inside one map step."""

    FUSED = "fused"          # quantize mu*x*(1-x) once
    FACTOR = "factor"        # quantize x*(1-x), then quantize mu*t
    MU_FIRST = "mu_first"    # quantize mu*x (10-bit register), then *(1-x)


class Fixed8(int):
    """An 8-bit state numerator; the state value is ``num / 256``."""

    def __new__(cls, num):
        num = int(num)
        if not 0 <= num <= 255:
            raise ValueError(f"Fixed8 numerator out of range: {num}")
        return super().__new__(cls, num)

    @property
    def value(self) -> float:
        return int(self) / 2**X_FRAC_BITS

    def __repr__(self):
        return f"Fixed8({int(self)}/256)"


class MuFixed(int):
    """An 8-bit control-parameter numerator; ``mu = num / 64``."""

    def __new__(cls, num):
        num = int(num)
        if not 0 <= num <= 255:
            raise ValueError(f"MuFixed numerator out of range: {num}")
        return super().__new__(cls, num)

    @property
    def value(self) -> float:
        return int(self) / 2**MU_FRAC_BITS

    def __repr__(self):
        return f"MuFixed({int(self)}/64)"


@dataclass(frozen=True)
class CycleReport:
    tail_length: int
    period: int

    @property
    def prbs_cycle(self) -> int:
        return 8 * self.period


def _as_mode(mode) -> PrecisionMode:
    return PrecisionMode(mode)


def _fixed_step_array(x, mu_num: int, rounding_nearest: bool, scheme: Scheme):
    # x: integer numpy array (or int) of state numerators
    one_minus = 256 - x
    if scheme is Scheme.FUSED:
        prod = x * one_minus * mu_num  # denominator 2**22
        out = (prod + (1 << 13)) >> 14 if rounding_nearest else prod >> 14
    elif scheme is Scheme.FACTOR:
        t = x * one_minus  # denominator 2**16
        t = (t + 128) >> 8 if rounding_nearest else t >> 8
        prod = t * mu_num  # denominator 2**14
        out = (prod + 32) >> 6 if rounding_nearest else prod >> 6
    elif scheme is Scheme.MU_FIRST:
        u = x * mu_num  # denominator 2**14
        u = (u + 32) >> 6 if rounding_nearest else u >> 6
        prod = u * one_minus  # denominator 2**16
        out = (prod + 128) >> 8 if rounding_nearest else prod >> 8
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return np.clip(out, 0, 255) if isinstance(out, np.ndarray) else min(max(out, 0), 255)


@lru_cache(maxsize=4096)
def _cached_table(mu_num: int, mode: PrecisionMode, scheme: Scheme) -> np.ndarray:
    x = np.arange(256, dtype=np.int64)
    table = _fixed_step_array(x, mu_num, mode is PrecisionMode.FIXED8_NEAREST, scheme)
    table = table.astype(np.uint8)
    table.flags.writeable = False
    return table


def step_table(mu, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> np.ndarray:
    """Successor of every one of the 256 fixed-point states, for one mu."""
    mode = _as_mode(mode)
    if not mode.is_fixed:
        raise ValueError("step tables exist only for fixed-point modes")
    return _cached_table(int(MuFixed(mu)), mode, Scheme(scheme))


def full_step_table(mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> np.ndarray:
    """``table[mu_num, x_num]`` for every mu and state numerator, shape (256, 256)."""
    mode = _as_mode(mode)
    mu = np.arange(256, dtype=np.int64)[:, None]
    x = np.arange(256, dtype=np.int64)[None, :]
    out = _fixed_step_array(x, mu, mode is PrecisionMode.FIXED8_NEAREST, Scheme(scheme))
    return out.astype(np.uint8)


def _is_integral(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def x_real(x) -> float:
    """Real state value: integers are 8-bit numerators, floats pass through."""
    return Fixed8(x).value if _is_integral(x) else float(x)


def mu_real(mu) -> float:
    """Real control parameter: integers are 6-bit-fraction numerators."""
    return MuFixed(mu).value if _is_integral(mu) else float(mu)


def logistic_step(x, mu, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED):
    """One iteration ``x -> mu * x * (1 - x)``.

    Integers (including :class:`Fixed8` / :class:`MuFixed`) are numerators
    and floats are real values.  Fixed-point modes take numerators and
    return a :class:`Fixed8`; ``FLOAT64`` returns a float.
    """
    mode = _as_mode(mode)
    if mode.is_fixed:
        x, mu = Fixed8(x), MuFixed(mu)
        out = _fixed_step_array(int(x), int(mu), mode is PrecisionMode.FIXED8_NEAREST, Scheme(scheme))
        return Fixed8(out)
    xv, muv = x_real(x), mu_real(mu)
    return muv * xv * (1.0 - xv)


def generate_states(x0, mu, nstates: int, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> np.ndarray:
    """States x(0) .. x(nstates-1).

    Fixed-point modes return uint8 numerators; ``FLOAT64`` returns float64
    values.
    """
    mode = _as_mode(mode)
    if mode.is_fixed:
        table = step_table(mu, mode, scheme).tolist()
        out = [0] * nstates
        x = int(Fixed8(x0))
        for k in range(nstates):
            out[k] = x
            x = table[x]
        return np.array(out, dtype=np.uint8)
    xv, muv = x_real(x0), mu_real(mu)
    out = np.empty(nstates, dtype=np.float64)
    for k in range(nstates):
        out[k] = xv
        xv = muv * xv * (1.0 - xv)
    return out


def states_to_bytes(states: np.ndarray) -> np.ndarray:
    if states.dtype == np.uint8:
        return states
    return np.clip(np.floor(states * 256.0), 0, 255).astype(np.uint8)


def generate_prbs(x0, mu, nbits: int, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED) -> np.ndarray:
    """The chaotic bit sequence b(0) .. b(nbits-1) as a uint8 array of 0/1.

    State k supplies bits 8k .. 8k+7, most significant fraction bit first.

    Integer ``x0`` / ``mu`` are key numerators (``x0 / 256``, ``mu / 64``)
    in every mode.
    """
    if nbits < 0:
        raise ValueError("nbits must be non-negative")
    nstates = -(-nbits // 8)
    states = generate_states(x0, mu, nstates, mode, scheme)
    return np.unpackbits(states_to_bytes(states))[:nbits]


def detect_cycle(x0, mu, mode=PrecisionMode.FIXED8_TRUNC, scheme=Scheme.FUSED,
                 cap: int = FLOAT64_CYCLE_CAP) -> CycleReport:
    """Pre-period and period of the orbit starting at ``x0``."""
    mode = _as_mode(mode)
    if mode.is_fixed:
        table = step_table(mu, mode, scheme).tolist()
        seen = {}
        x = int(Fixed8(x0))
        k = 0
        while x not in seen:
            seen[x] = k
            x = table[x]
            k += 1
        return CycleReport(tail_length=seen[x], period=k - seen[x])

    muv, start = mu_real(mu), x_real(x0)

    def f(v):
        return muv * v * (1.0 - v)

    # Brent: find the period first, then the tail
    power = lam = 1
    tortoise, hare = start, f(start)
    steps = 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(hare)
        lam += 1
        steps += 1
        if steps > cap:
            raise IterationCapExceededError(f"no repeated state within {cap} iterations")
    tortoise = hare = start
    for _ in range(lam):
        hare = f(hare)
    tail = 0
    while tortoise != hare:
        tortoise, hare = f(tortoise), f(hare)
        tail += 1
    return CycleReport(tail_length=tail, period=lam)


@dataclass(frozen=True)
class SurveyRow:
    mode: PrecisionMode
    scheme: Scheme
    report: CycleReport

    def matches(self, period: int = 8) -> bool:
        return self.report.period == period


def survey_quantization(x0, mu) -> list[SurveyRow]:
    """Cycle structure of one key under every fixed-point rounding variant."""
    rows = []
    for scheme in Scheme:
        for mode in (PrecisionMode.FIXED8_TRUNC, PrecisionMode.FIXED8_NEAREST):
            rows.append(SurveyRow(mode, scheme, detect_cycle(x0, mu, mode, scheme)))
    return rows


def format_survey(rows, target_period: int = 8) -> str:
    lines = [f"{'mode':<16}{'scheme':<10}{'tail':>6}{'period':>8}{'prbs_cycle':>12}  reproduces"]
    for r in rows:
        lines.append(
            f"{r.mode.value:<16}{r.scheme.value:<10}{r.report.tail_length:>6}"
            f"{r.report.period:>8}{r.report.prbs_cycle:>12}  {'yes' if r.matches(target_period) else 'no'}"
        )
    hits = [f"{r.mode.value}/{r.scheme.value}" for r in rows if r.matches(target_period)]
    lines.append(f"period {target_period} / PRBS cycle {8 * target_period} reproduced by: "
                 + (", ".join(hits) if hits else "none"))
    return "\n".join(lines)


def prbs_to_image(bits, width: int) -> np.ndarray:
    """Lay bits out row by row as a (height, width) image of 0/255 bytes."""
    if width < 1:
        raise ValueError("width must be >= 1")
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    height = -(-bits.size // width)
    img = np.zeros(height * width, dtype=np.uint8)
    img[: bits.size] = bits * 255
    return img.reshape(height, width)
