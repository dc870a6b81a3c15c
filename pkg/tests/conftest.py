import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_force_distance(mask):
    """Per-pixel Euclidean distance to the nearest background pixel, with
    the image border treated as background. O(n^2), oracle only."""
    h, w = mask.shape
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    bg_r, bg_c = np.nonzero(~mask)
    dist = np.minimum.reduce([rr + 1, cc + 1, h - rr, w - cc]).astype(float)
    for r, c in zip(bg_r, bg_c):
        dist = np.minimum(dist, np.hypot(rr - r, cc - c))
    return dist
