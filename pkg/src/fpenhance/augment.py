"""Fingerprint-specific data augmentation with consistent co-transformation
of image, mask, orientation field, frequency map, and skeleton.

Geometric transforms use bilinear resampling for intensities and nearest
for categorical rasters; orientation is resampled in double-angle space to
avoid averaging across the 0/pi seam. Photometric transforms, scratches,
and abrasions touch the image only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from PIL import Image, ImageDraw
from scipy.ndimage import affine_transform, grey_dilation, grey_erosion

from .core import as_gray, as_mask, check_same_shape, fold_angle
from .fields import double_angle_decode, double_angle_encode


@dataclass(frozen=True)
class AugmentSpec:
    translate_frac: float = 0.05
    rotate_deg: float = 20.0
    scale_frac: float = 0.15
    hflip: bool = False
    gamma_range: tuple[float, float] = (0.7, 1.4)
    contrast_range: tuple[float, float] = (0.5, 1.0)
    morph: str = "none"  # "none", "erode", "dilate"
    scratches: tuple[int, int] = (0, 3)
    abrasions: tuple[int, int] = (0, 2)
    seed: int = 0

    def __post_init__(self):
        if self.translate_frac < 0 or self.scale_frac < 0:
            raise ValueError("fractions must be >= 0")
        if not 0.0 <= self.rotate_deg <= 180.0:
            raise ValueError("rotate_deg must lie in [0, 180]")
        if self.morph not in ("none", "erode", "dilate"):
            raise ValueError("morph must be 'none', 'erode', or 'dilate'")

    @classmethod
    def identity(cls, seed: int = 0) -> "AugmentSpec":
        return cls(translate_frac=0.0, rotate_deg=0.0, scale_frac=0.0, hflip=False,
                   gamma_range=(1.0, 1.0), contrast_range=(1.0, 1.0), morph="none",
                   scratches=(0, 0), abrasions=(0, 0), seed=seed)


@dataclass(frozen=True)
class Sample:
    image: np.ndarray
    mask: np.ndarray
    orient: np.ndarray
    freq: np.ndarray
    skeleton: np.ndarray | None = None

    def __post_init__(self):
        rasters = [self.image, self.mask, self.orient, self.freq]
        if self.skeleton is not None:
            rasters.append(self.skeleton)
        check_same_shape(*rasters)


def _warp(raster, matrix, offset, order, cval=0.0):
    return affine_transform(
        np.asarray(raster, dtype=np.float64), matrix, offset=offset,
        order=order, mode="constant", cval=cval,
    )


def _geometry(sample: Sample, delta_rad, scale, t_row, t_col, hflip):
    identity = delta_rad == 0.0 and scale == 1.0 and t_row == 0.0 and t_col == 0.0
    if identity and not hflip:
        return sample
    if identity and hflip:
        return Sample(
            image=sample.image[:, ::-1].copy(),
            mask=sample.mask[:, ::-1].copy(),
            orient=fold_angle(math.pi - sample.orient[:, ::-1]),
            freq=sample.freq[:, ::-1].copy(),
            skeleton=None if sample.skeleton is None else sample.skeleton[:, ::-1].copy(),
        )
    h, w = sample.image.shape
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])
    # forward map in (row, col): flip, then scale, then rotate (delta is CCW
    # with y up), then translate
    cd, sd = math.cos(delta_rad), math.sin(delta_rad)
    rot = np.array([[cd, -sd], [sd, cd]])
    flip = np.array([[1.0, 0.0], [0.0, -1.0 if hflip else 1.0]])
    fwd = scale * rot @ flip
    inv = np.linalg.inv(fwd)
    offset = center - inv @ (center + np.array([t_row, t_col]))

    image = np.clip(np.rint(_warp(sample.image, inv, offset, order=1)), 0, 255).astype(np.uint8)
    mask = _warp(sample.mask, inv, offset, order=0) > 0.5
    if not mask.any():
        raise ValueError("empty foreground after augment")
    x, y = double_angle_encode(sample.orient)
    wx = _warp(x, inv, offset, order=1, cval=1.0)
    wy = _warp(y, inv, offset, order=1)
    degenerate = (wx == 0.0) & (wy == 0.0)
    wx[degenerate] = 1.0
    orient = double_angle_decode(wx, wy)
    if hflip:
        orient = fold_angle(math.pi - orient)
    orient = fold_angle(orient + delta_rad)
    freq = _warp(sample.freq, inv, offset, order=0) / scale
    freq[~mask] = 0.0
    skeleton = None
    if sample.skeleton is not None:
        skeleton = (_warp(sample.skeleton, inv, offset, order=0) > 127).astype(np.uint8) * 255
    return Sample(image=image, mask=mask, orient=orient, freq=freq, skeleton=skeleton)


def _photometric(image, gamma, contrast):
    if gamma == 1.0 and contrast == 1.0:
        return image
    img = image.astype(np.float64) / 255.0
    if gamma != 1.0:
        img = img ** gamma
    if contrast != 1.0:
        img = 0.5 + contrast * (img - 0.5)
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def _morphology(image, morph):
    if morph == "erode":
        return grey_erosion(image, size=3)
    if morph == "dilate":
        return grey_dilation(image, size=3)
    return image


def _draw_defects(image, mask, rng, n_scratches, n_abrasions):
    if n_scratches == 0 and n_abrasions == 0:
        return image
    pil = Image.fromarray(image, mode="L")
    draw = ImageDraw.Draw(pil)
    rows, cols = np.nonzero(mask)
    if rows.size == 0:
        return image

    def pick_point():
        k = int(rng.integers(rows.size))
        return int(cols[k]), int(rows[k])

    for _ in range(n_scratches):
        p0, p1 = pick_point(), pick_point()
        width = int(rng.integers(1, 4))
        bright = bool(rng.integers(2))
        value = int(rng.integers(200, 256)) if bright else int(rng.integers(0, 56))
        draw.line([p0, p1], fill=value, width=width)
    for _ in range(n_abrasions):
        cx, cy = pick_point()
        ax = int(rng.integers(5, 26)) / 2.0
        ay = int(rng.integers(5, 26)) / 2.0
        value = int(rng.integers(200, 256))  # pulled toward the light background
        draw.ellipse([cx - ax, cy - ay, cx + ax, cy + ay], fill=value)
    return np.asarray(pil, dtype=np.uint8)


def augment(sample: Sample, spec: AugmentSpec) -> Sample:
    as_gray(sample.image)
    as_mask(sample.mask)
    rng = np.random.default_rng(spec.seed)
    h, w = sample.image.shape
    t_col = float(rng.uniform(-spec.translate_frac, spec.translate_frac)) * w \
        if spec.translate_frac else 0.0
    t_row = float(rng.uniform(-spec.translate_frac, spec.translate_frac)) * h \
        if spec.translate_frac else 0.0
    delta = math.radians(float(rng.uniform(-spec.rotate_deg, spec.rotate_deg))) \
        if spec.rotate_deg else 0.0
    scale = 1.0 + float(rng.uniform(-spec.scale_frac, spec.scale_frac)) \
        if spec.scale_frac else 1.0
    gamma = float(rng.uniform(*spec.gamma_range))
    contrast = float(rng.uniform(*spec.contrast_range))
    n_scratches = int(rng.integers(spec.scratches[0], spec.scratches[1] + 1))
    n_abrasions = int(rng.integers(spec.abrasions[0], spec.abrasions[1] + 1))

    out = _geometry(sample, delta, scale, t_row, t_col, spec.hflip)
    image = _photometric(out.image, gamma, contrast)
    image = _morphology(image, spec.morph)
    image = _draw_defects(image, out.mask, rng, n_scratches, n_abrasions)
    return replace(out, image=image)


def rotated(sample: Sample, degrees: float) -> Sample:
    """Pure rotation helper (CCW with y up), ground truth co-rotated."""
    return _geometry(sample, math.radians(degrees), 1.0, 0.0, 0.0, False)
