"""Standardized Gabor kernels, the precomputed filter bank, nearest-filter
selection.

Each kernel is g(x, y) = exp(-(xt^2 + yt^2) / (2 sigma^2)) * cos(2 pi f xt)
with xt = x sin(theta) + y cos(theta), yt = -x cos(theta) + y sin(theta),
sigma = 5 / (12 f), evaluated on the odd square grid of side
s = 1 + 2 * ceil(3 sigma), then mean-subtracted and L2-normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_ORIENTATION_COUNT = 16
DEFAULT_PERIODS = tuple(range(5, 14))


@dataclass(frozen=True)
class GaborKernel:
    theta: float
    freq: float
    sigma: float
    size: int
    weights: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class GaborBank:
    orientations: tuple[float, ...]
    frequencies: tuple[float, ...]
    kernels: tuple[GaborKernel, ...]  # orientation-major, frequency-ascending

    def __len__(self) -> int:
        return len(self.kernels)

    def index_of(self, orientation_index: int, frequency_index: int) -> int:
        return orientation_index * len(self.frequencies) + frequency_index


def kernel_sigma(freq: float) -> float:
    return 5.0 / (12.0 * freq)


def kernel_size(freq: float) -> int:
    return 1 + 2 * math.ceil(3.0 * kernel_sigma(freq))


def gabor_kernel(theta: float, freq: float) -> GaborKernel:
    if not 0.0 <= theta < math.pi:
        raise ValueError("theta must lie in [0, pi)")
    if not 0.0 < freq < 0.5:
        raise ValueError("freq must lie in (0, 0.5)")
    sigma = kernel_sigma(freq)
    size = kernel_size(freq)
    half = (size - 1) // 2
    # kernel coordinates: x = column offset, y = row offset (downward), so
    # that the cosine stripes lie along ridge angle theta in the y-up
    # orientation convention
    x = np.arange(-half, half + 1, dtype=np.float64)
    yy, xx = np.meshgrid(x, x, indexing="ij")
    xt = xx * math.sin(theta) + yy * math.cos(theta)
    yt = -xx * math.cos(theta) + yy * math.sin(theta)
    w = np.exp(-(xt**2 + yt**2) / (2.0 * sigma**2)) * np.cos(2.0 * math.pi * freq * xt)
    w -= w.mean()
    w /= np.linalg.norm(w)
    return GaborKernel(theta=theta, freq=freq, sigma=sigma, size=size, weights=w)


def build_bank(
    orientation_count: int = DEFAULT_ORIENTATION_COUNT,
    periods=DEFAULT_PERIODS,
) -> GaborBank:
    if orientation_count < 1:
        raise ValueError("orientation_count must be >= 1")
    periods = tuple(sorted(float(p) for p in periods))
    if not periods or any(p <= 2.0 for p in periods):
        raise ValueError("periods must be non-empty and all > 2 pixels")
    orientations = tuple(i * math.pi / orientation_count for i in range(orientation_count))
    frequencies = tuple(1.0 / p for p in reversed(periods))  # strictly increasing
    kernels = tuple(
        gabor_kernel(theta, f) for theta in orientations for f in frequencies
    )
    return GaborBank(orientations=orientations, frequencies=frequencies, kernels=kernels)


def orientation_distance(a, b):
    """Circular distance between ridge orientations (period pi)."""
    d = np.abs(np.asarray(a) - np.asarray(b))
    return np.minimum(d, np.pi - d)


def select_indices(bank: GaborBank, theta, freq) -> np.ndarray:
    """Vectorized nearest-filter selection: minimal circular orientation
    distance first, then minimal |f - f_j|; ties resolved to the lower
    index. Frequencies outside the bank range clamp to the endpoints."""
    theta = np.asarray(theta, dtype=np.float64)
    freq = np.asarray(freq, dtype=np.float64)
    angles = np.array(bank.orientations)
    n = len(angles)
    # the two bracketing grid angles are the only argmin candidates
    i0 = np.clip(np.floor(theta * n / np.pi).astype(np.intp), 0, n - 1)
    d0 = orientation_distance(theta, angles[i0])
    i1 = np.where(i0 + 1 < n, i0 + 1, 0)
    d1 = orientation_distance(theta, angles[i1])
    # on an exact tie the lower index wins (0 beats n-1 across the seam)
    oi = np.where((d1 < d0) | ((d1 == d0) & (i1 < i0)), i1, i0)

    freqs = np.array(bank.frequencies)
    j = np.clip(np.searchsorted(freqs, freq), 1, len(freqs) - 1)
    dl = np.abs(freq - freqs[j - 1])
    dr = np.abs(freq - freqs[j])
    fi = np.where(dr < dl, j, j - 1)
    return oi * len(freqs) + fi


def select_filter(bank: GaborBank, theta: float, freq: float) -> int:
    if not 0.0 <= theta < math.pi:
        raise ValueError("theta must lie in [0, pi)")
    if freq <= 0.0:
        raise ValueError("freq must be > 0")
    return int(select_indices(bank, theta, freq))
