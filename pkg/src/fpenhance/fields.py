"""Orientation-field and frequency-map production.

Orientation uses classical squared-gradient averaging in double-angle
space; frequency uses the oriented-window x-signature technique; ground
truth frequency is derived from ridge-skeleton crossings along the
orientation normal. Externally computed fields can be loaded through the
OFD1/FQM1 codecs instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt, map_coordinates, uniform_filter
from scipy.signal import find_peaks

from .core import as_gray, as_mask, check_same_shape, fold_angle

log = logging.getLogger(__name__)

DEFAULT_FALLBACK_FREQ = 1.0 / 9.0


@dataclass(frozen=True)
class OrientationParams:
    gradient_window: int = 33
    coherence_floor: float = 0.1

    def __post_init__(self):
        if self.gradient_window < 3 or self.gradient_window % 2 == 0:
            raise ValueError("gradient_window must be odd and >= 3")
        if not 0.0 <= self.coherence_floor < 1.0:
            raise ValueError("coherence_floor must lie in [0, 1)")


@dataclass(frozen=True)
class FrequencyParams:
    window_length: int = 64
    min_period: int = 5
    max_period: int = 13
    block_size: int = 16

    def __post_init__(self):
        if not 2 <= self.min_period < self.max_period:
            raise ValueError("require 2 <= min_period < max_period")
        if self.window_length < 2 * self.max_period:
            raise ValueError("window_length must be >= 2 * max_period")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")


def double_angle_encode(angles):
    a = np.asarray(angles, dtype=np.float64)
    return np.cos(2.0 * a), np.sin(2.0 * a)


def double_angle_decode(x, y, where=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    zero = (x == 0.0) & (y == 0.0)
    if where is not None:
        zero &= np.asarray(where, bool)
    if np.any(zero):
        raise ValueError("undefined orientation: zero double-angle vector")
    return fold_angle(np.arctan2(y, x) / 2.0)


def _fill_from_nearest(values, valid):
    """Replace values outside `valid` with the nearest valid value
    (Euclidean nearest, deterministic)."""
    if not np.any(valid):
        raise ValueError("no valid pixels to fill from")
    _, (ir, ic) = distance_transform_edt(~valid, return_indices=True)
    return values[ir, ic]


def estimate_orientation(image, mask, params: OrientationParams = OrientationParams()):
    img = as_gray(image).astype(np.float64)
    m = as_mask(mask)
    check_same_shape(img, m)
    if not np.any(m):
        raise ValueError("empty mask")
    gy_down, gx = np.gradient(img)
    gy = -gy_down  # y-up convention
    gxx = uniform_filter(gx * gx, params.gradient_window)
    gyy = uniform_filter(gy * gy, params.gradient_window)
    gxy = uniform_filter(gx * gy, params.gradient_window)
    num = np.hypot(gxx - gyy, 2.0 * gxy)
    den = gxx + gyy
    coherence = np.divide(num, den, out=np.zeros_like(num), where=den > 1e-12)
    theta = fold_angle(0.5 * np.arctan2(2.0 * gxy, gxx - gyy) + math.pi / 2.0)
    coherent = m & (coherence >= params.coherence_floor) & (den > 1e-12)
    if not np.any(coherent):
        raise ValueError("no coherent orientation pixels (flat image?)")
    # Fill low-coherence pixels from the nearest coherent one so the field
    # is total over the mask.
    cx, cy = double_angle_encode(theta)
    cx = _fill_from_nearest(cx, coherent)
    cy = _fill_from_nearest(cy, coherent)
    return double_angle_decode(cx, cy)


def _oriented_signature(raster, r, c, theta, length, width, step=1.0):
    """Sample `raster` on an oriented window centered at (r, c) and average
    along the ridge direction; returns the profile along the normal."""
    dc, dr = math.cos(theta), -math.sin(theta)  # ridge direction (array coords)
    nc, nr = -math.sin(theta), -math.cos(theta)  # normal direction
    u = np.arange(width, dtype=np.float64) - (width - 1) / 2.0
    v = (np.arange(length / step, dtype=np.float64) * step) - (length - step) / 2.0
    rows = r + u[:, None] * dr + v[None, :] * nr
    cols = c + u[:, None] * dc + v[None, :] * nc
    samples = map_coordinates(raster, [rows, cols], order=1, mode="nearest")
    inside = ((rows >= 0) & (rows <= raster.shape[0] - 1)
              & (cols >= 0) & (cols <= raster.shape[1] - 1)).all(axis=0)
    return samples.mean(axis=0), v, inside


def _central_valid_slice(inside):
    """Largest contiguous run of in-bounds samples containing the center."""
    n = len(inside)
    mid = n // 2
    if not inside[mid]:
        return slice(mid, mid)
    lo = mid
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    hi = mid + 1
    while hi < n and inside[hi]:
        hi += 1
    return slice(lo, hi)


def _refine_peak(signal, idx):
    if 0 < idx < len(signal) - 1:
        a, b, c = signal[idx - 1], signal[idx], signal[idx + 1]
        denom = a - 2.0 * b + c
        if abs(denom) > 1e-12:
            return idx + 0.5 * (a - c) / denom
    return float(idx)


def _block_centers(shape, block):
    rows = np.arange(block // 2, shape[0], block)
    cols = np.arange(block // 2, shape[1], block)
    return rows, cols


def _interpolate_blocks(values, valid):
    """Fill invalid block values by iterative 3x3 mean of valid neighbors."""
    values = values.copy()
    valid = valid.copy()
    while not valid.all():
        vsum = uniform_filter(np.where(valid, values, 0.0), 3, mode="constant") * 9.0
        vcnt = uniform_filter(valid.astype(np.float64), 3, mode="constant") * 9.0
        newly = ~valid & (vcnt > 0.5)
        if not np.any(newly):
            break
        values[newly] = vsum[newly] / vcnt[newly]
        valid |= newly
    return values, valid


def _blocks_to_map(block_values, block, shape):
    full = np.repeat(np.repeat(block_values, block, axis=0), block, axis=1)
    return full[: shape[0], : shape[1]]


def estimate_frequency(image, mask, orient, params: FrequencyParams = FrequencyParams()):
    img = as_gray(image).astype(np.float64)
    m = as_mask(mask)
    th = np.asarray(orient, dtype=np.float64)
    check_same_shape(img, m, th)
    if not np.any(m):
        raise ValueError("empty mask")
    inverted = 255.0 - img  # ridges become profile peaks
    block = params.block_size
    rows, cols = _block_centers(img.shape, block)
    fmin, fmax = 1.0 / params.max_period, 1.0 / params.min_period
    bvals = np.zeros((len(rows), len(cols)))
    bvalid = np.zeros_like(bvals, dtype=bool)
    bfg = np.zeros_like(bvalid)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            if not m[r, c]:
                continue
            bfg[i, j] = True
            profile, _, inside = _oriented_signature(
                inverted, r, c, th[r, c], params.window_length, width=block
            )
            valid = _central_valid_slice(inside)
            profile = profile[valid]
            if len(profile) < 2 * params.min_period:
                continue
            prominence = 0.05 * (profile.max() - profile.min())
            peaks, _ = find_peaks(profile, distance=max(2, params.min_period - 1),
                                  prominence=prominence)
            if len(peaks) < 2:
                continue
            refined = np.array([_refine_peak(profile, p) for p in peaks])
            spacing = float(np.median(np.diff(refined)))
            if spacing <= 0:
                continue
            f = 1.0 / spacing
            if fmin * 0.9 <= f <= fmax * 1.1:
                bvals[i, j] = min(max(f, fmin), fmax)
                bvalid[i, j] = True
    if not bvalid.any():
        log.warning("no reliable frequency estimate; using fallback %.4f", DEFAULT_FALLBACK_FREQ)
        bvals[bfg] = min(max(DEFAULT_FALLBACK_FREQ, fmin), fmax)
        bvalid |= bfg
    bvals, _ = _interpolate_blocks(bvals, bvalid)
    freq = _blocks_to_map(bvals, block, img.shape)
    freq = np.clip(freq, fmin, fmax)
    freq[~m] = 0.0
    return freq


def frequency_from_skeleton(skeleton, orient, mask, window_length: int = 64,
                            block_size: int = 8):
    """Frequency ground truth: inverse mean spacing of skeleton crossings
    sampled along the line through each pixel normal to the orientation."""
    skel = as_gray(skeleton)
    m = as_mask(mask)
    th = np.asarray(orient, dtype=np.float64)
    check_same_shape(skel, m, th)
    if not np.any(skel > 127):
        raise ValueError("empty skeleton")
    ridge = (skel > 127).astype(np.float64)
    step = 0.5
    rows, cols = _block_centers(skel.shape, block_size)
    bvals = np.zeros((len(rows), len(cols)))
    bvalid = np.zeros_like(bvals, dtype=bool)
    bfg = np.zeros_like(bvalid)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            if not m[r, c]:
                continue
            bfg[i, j] = True
            profile, v, inside = _oriented_signature(
                ridge, r, c, th[r, c], window_length, width=1, step=step
            )
            valid = _central_valid_slice(inside)
            profile, v = profile[valid], v[valid]
            hits = profile > 0.5
            if not hits.any():
                continue
            # centers of consecutive runs of skeleton hits
            edges = np.flatnonzero(np.diff(np.concatenate(([0], hits.view(np.uint8), [0]))))
            starts, stops = edges[::2], edges[1::2]
            centers = v[starts] + (stops - starts - 1) * step / 2.0
            if len(centers) < 2:
                continue
            spacing = float(np.mean(np.diff(centers)))
            if spacing >= 2.0 and 1.0 / spacing < 0.5:
                bvals[i, j] = 1.0 / spacing
                bvalid[i, j] = True
    if not bvalid.any():
        log.warning(
            "skeleton yields no measurable ridge spacing; using fallback %.4f",
            DEFAULT_FALLBACK_FREQ,
        )
        bvals[bfg] = DEFAULT_FALLBACK_FREQ
        bvalid |= bfg
    bvals, _ = _interpolate_blocks(bvals, bvalid)
    freq = _blocks_to_map(bvals, block_size, skel.shape)
    freq[~m] = 0.0
    return freq
