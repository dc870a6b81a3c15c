"""Core raster conventions, validation helpers, minutia type, mask erosion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import distance_transform_edt

TWO_PI = 2.0 * math.pi


class MinutiaKind(enum.Enum):
    ENDING = "E"
    BIFURCATION = "B"


@dataclass(frozen=True)
class Minutia:
    """A ridge ending or bifurcation: sub-pixel position, direction, type.

    x is the column coordinate, y the row coordinate; direction is in
    radians, normalized to [0, 2*pi).
    """

    x: float
    y: float
    direction: float
    kind: MinutiaKind

    def __post_init__(self):
        object.__setattr__(self, "direction", float(self.direction) % TWO_PI)


def as_gray(image) -> np.ndarray:
    img = np.asarray(image)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("grayscale image must be a non-empty 2D array")
    if img.dtype != np.uint8:
        raise ValueError("grayscale image must be uint8")
    return img


def as_mask(mask) -> np.ndarray:
    m = np.asarray(mask)
    if m.ndim != 2 or m.size == 0:
        raise ValueError("mask must be a non-empty 2D array")
    return m.astype(bool)


def check_same_shape(*rasters) -> None:
    shapes = {np.asarray(r).shape for r in rasters}
    if len(shapes) > 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def check_orientation(angles, where=None) -> np.ndarray:
    a = np.asarray(angles, dtype=np.float64)
    sel = a if where is None else a[np.asarray(where, bool)]
    if sel.size and (np.min(sel) < 0 or np.max(sel) >= np.pi + 1e-9):
        raise ValueError("orientation angles must lie in [0, pi)")
    return a


def check_frequency(freqs, mask) -> np.ndarray:
    f = np.asarray(freqs, dtype=np.float64)
    fg = f[np.asarray(mask, bool)]
    if fg.size and (np.min(fg) <= 0 or np.max(fg) >= 0.5):
        raise ValueError("foreground frequencies must lie in (0, 0.5)")
    return f


def fold_angle(angles):
    """Fold arbitrary angles into the ridge-orientation range [0, pi)."""
    return np.mod(angles, np.pi)


def erode_mask(mask, radius: float) -> np.ndarray:
    """Keep foreground pixels at Euclidean distance > radius from any
    background pixel; the image border counts as background."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    m = as_mask(mask)
    padded = np.pad(m, 1, constant_values=False)
    dist = distance_transform_edt(padded)[1:-1, 1:-1]
    return dist > radius
