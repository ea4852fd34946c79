"""Binary PGM images, raw byte files and key files.

Every writer goes through :func:`atomic_write` so an interrupted run never
leaves a truncated file behind.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chaos import PrecisionMode
from .cipher import SecretKey, as_bytes
from .errors import MalformedKeyError, MalformedPGMError, NoShapeError


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text(path, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    atomic_write(path, text.encode("utf-8"))


_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) PGM with maxval 255 into a (height, width) array."""
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise MalformedPGMError("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    if fields[0] != b"P5":
        raise MalformedPGMError(f"bad magic {fields[0][:8]!r}, expected P5")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise MalformedPGMError("non-numeric PGM header field") from exc
    if maxval != 255:
        raise MalformedPGMError(f"maxval {maxval} unsupported, expected 255")
    if width < 0 or height < 0:
        raise MalformedPGMError("negative dimensions")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise MalformedPGMError("missing whitespace after maxval")
    pos += 1
    payload = data[pos:pos + width * height]
    if len(payload) < width * height:
        raise MalformedPGMError(f"payload has {len(payload)} bytes, expected {width * height}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).copy()


def encode_pgm(image) -> bytes:
    arr = as_bytes(image)
    if arr.ndim != 2:
        raise NoShapeError("PGM output needs a 2-D (height, width) array")
    height, width = arr.shape
    return b"P5\n%d %d\n255\n" % (width, height) + np.ascontiguousarray(arr).tobytes()


def read_pgm(path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def write_pgm(path, image) -> None:
    atomic_write(path, encode_pgm(image))


def read_raw(path, width: int | None = None) -> np.ndarray:
    """Headerless bytes; reshaped to rows of ``width`` when it divides the length."""
    data = np.frombuffer(Path(path).read_bytes(), dtype=np.uint8).copy()
    if width:
        if data.size % width:
            raise NoShapeError(f"{data.size} bytes do not fill rows of width {width}")
        data = data.reshape(-1, width)
    return data


def write_raw(path, seq) -> None:
    atomic_write(path, as_bytes(seq).tobytes())


@dataclass(frozen=True)
class KeyFile:
    key: SecretKey
    mode: PrecisionMode | None = None


_KEY_FIELDS = {"L": (1, None), "initial_key": (0, 255), "mu_num": (0, 255), "x0_num": (0, 255)}


def parse_key(text: str) -> KeyFile:
    values = {}
    mode = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise MalformedKeyError(f"line {lineno}: expected name=value")
        if name == "mode":
            if mode is not None:
                raise MalformedKeyError(f"line {lineno}: duplicate field mode")
            try:
                mode = PrecisionMode(value.lower())
            except ValueError:
                raise MalformedKeyError(f"line {lineno}: unknown mode {value!r}") from None
            continue
        if name not in _KEY_FIELDS:
            raise MalformedKeyError(f"line {lineno}: unknown field {name!r}")
        if name in values:
            raise MalformedKeyError(f"line {lineno}: duplicate field {name}")
        try:
            v = int(value, 10)
        except ValueError:
            raise MalformedKeyError(f"line {lineno}: {name} is not an integer") from None
        lo, hi = _KEY_FIELDS[name]
        if v < lo or (hi is not None and v > hi):
            raise MalformedKeyError(f"line {lineno}: {name}={v} out of range")
        values[name] = v
    missing = [f for f in _KEY_FIELDS if f not in values]
    if missing:
        raise MalformedKeyError(f"missing field(s): {', '.join(missing)}")
    key = SecretKey(values["L"], values["initial_key"], values["mu_num"], values["x0_num"])
    return KeyFile(key, mode)


def format_key(key: SecretKey, mode=None) -> str:
    lines = [
        "# mu = mu_num/64, x(0) = x0_num/256",
        f"L={key.L}",
        f"initial_key={key.initial_key}",
        f"mu_num={int(key.mu)}",
        f"x0_num={int(key.x0)}",
    ]
    if mode is not None:
        lines.append(f"mode={PrecisionMode(mode).value}")
    return "\n".join(lines) + "\n"


def load_key(path) -> KeyFile:
    return parse_key(Path(path).read_text(encoding="utf-8"))


def read_key(path) -> SecretKey:
    return load_key(path).key


def write_key(path, key: SecretKey, mode=None) -> None:
    atomic_write(path, format_key(key, mode).encode("utf-8"))
