"""Fixed-bandwidth density estimation helpers.

Silverman's rule keeps renders reproducible: the bandwidth is a pure
function of the sample, never hand-tuned per figure.
"""

from __future__ import annotations

import numpy as np


def silverman_bandwidth(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 2:
        raise ValueError("need at least two samples for a bandwidth")
    sd = float(np.std(v))
    q75, q25 = np.percentile(v, [75.0, 25.0])
    iqr = (q75 - q25) / 1.34
    scale = min(sd, iqr) if iqr > 0.0 else sd
    if scale == 0.0:
        raise ValueError("degenerate sample: zero spread")
    return 0.9 * scale * n ** (-0.2)


def gaussian_kde(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Gaussian kernel density of ``values`` on ``grid`` (Silverman h)."""
    v = np.asarray(values, dtype=float)
    h = silverman_bandwidth(v)
    z = (np.asarray(grid, dtype=float)[:, None] - v[None, :]) / h
    return np.exp(-0.5 * z * z).sum(axis=1) / (v.size * h * np.sqrt(2.0 * np.pi))


def log_space_density(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Density of a positive sample evaluated on a positive grid, with the
    KDE carried out on log(values): f(u) = f_log(log u) / u.  This is the
    right scale for statistics spread over many orders of magnitude."""
    v = np.asarray(values, dtype=float)
    v = v[v > 0.0]
    if v.size < 2:
        raise ValueError("need at least two positive samples")
    g = np.asarray(grid, dtype=float)
    if np.any(g <= 0.0):
        raise ValueError("log-space density needs a positive grid")
    return gaussian_kde(np.log(v), np.log(g)) / g


def mode_concentration(values: np.ndarray, lo: float = 0.75, hi: float = 1.25) -> float:
    """Fraction of |values| inside the band [lo, hi] around the limit
    modes at +-1; grows as the two-point limit takes over."""
    a = np.abs(np.asarray(values, dtype=float))
    return float(np.mean((a >= lo) & (a <= hi)))
