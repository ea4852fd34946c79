"""Synthetic correlated plaintexts for experiments."""

from __future__ import annotations

import numpy as np


def smooth_signal(rng: np.random.Generator, m: int, components: int = 3,
                  amp=(10.0, 40.0), period=(20.0, 200.0), noise: float = 2.0) -> np.ndarray:
    """Sum of random sinusoids around mid-grey plus Gaussian noise, as bytes."""
    n = np.arange(m)
    v = np.full(m, 128.0)
    for _ in range(components):
        a = rng.uniform(*amp)
        p = rng.uniform(*period)
        v += a * np.sin(n / p + rng.uniform(0, 2 * np.pi))
    v += rng.normal(0.0, noise, m)
    return np.clip(np.rint(v), 0, 255).astype(np.uint8)


def smooth_image(height: int = 256, width: int = 256) -> np.ndarray:
    """Deterministic grey-level test card: gradients, blobs and a few edges."""
    y, x = np.mgrid[0:height, 0:width] / np.array([height, width]).reshape(2, 1, 1) * 256
    v = 100 + 0.25 * x + 40 * np.sin(y / 23.0) * np.cos(x / 37.0)
    v += 60 * np.exp(-((x - 150) ** 2 + (y - 110) ** 2) / 1800.0)
    v[(x > 30) & (x < 80) & (y > 160) & (y < 220)] -= 70
    return np.clip(np.rint(v), 0, 255).astype(np.uint8)
