"""Minutiae extraction from near-binary enhanced images: binarization,
Zhang-Suen thinning, crossing-number analysis with spur pruning."""

from __future__ import annotations

import math

import numpy as np

from .core import Minutia, MinutiaKind, as_mask, check_same_shape

# 8-neighborhood cycle starting north, clockwise: offsets as (dr, dc)
_CYCLE = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]


def binarize(enhanced, threshold: float = 0.5) -> np.ndarray:
    values = np.asarray(enhanced, dtype=np.float64)
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise ValueError("enhanced values must lie in [0, 1]")
    return values >= threshold


def _neighbors(padded):
    """The 8 shifted copies of a padded boolean raster, cycle order."""
    return [padded[1 + dr : padded.shape[0] - 1 + dr,
                   1 + dc : padded.shape[1] - 1 + dc] for dr, dc in _CYCLE]


def _thin_pass(img, step):
    p = np.pad(img, 1)
    n = [x.astype(np.uint8) for x in _neighbors(p)]
    b = sum(n)
    transitions = sum((n[i] == 0) & (n[(i + 1) % 8] == 1) for i in range(8))
    p2, p4, p6, p8 = n[0], n[2], n[4], n[6]
    if step == 0:
        c1 = (p2 * p4 * p6) == 0
        c2 = (p4 * p6 * p8) == 0
    else:
        c1 = (p2 * p4 * p8) == 0
        c2 = (p2 * p6 * p8) == 0
    remove = img & (b >= 2) & (b <= 6) & (transitions == 1) & c1 & c2
    return img & ~remove, bool(remove.any())


def thin(binary) -> np.ndarray:
    """Zhang-Suen iterative thinning to a 1-pixel-wide 8-connected skeleton."""
    img = np.asarray(binary).astype(bool)
    while True:
        img, c1 = _thin_pass(img, 0)
        img, c2 = _thin_pass(img, 1)
        if not (c1 or c2):
            return img


def crossing_numbers(skeleton) -> np.ndarray:
    """CN = half the sum of absolute transitions around the 8-neighbor
    cycle, at every pixel."""
    p = np.pad(np.asarray(skeleton).astype(np.uint8), 1)
    n = _neighbors(p)
    cn = sum(np.abs(n[i].astype(np.int8) - n[(i + 1) % 8].astype(np.int8))
             for i in range(8))
    return cn // 2


def _skeleton_neighbors(skel, r, c):
    out = []
    for dr, dc in _CYCLE:
        rr, cc = r + dr, c + dc
        if 0 <= rr < skel.shape[0] and 0 <= cc < skel.shape[1] and skel[rr, cc]:
            out.append((rr, cc))
    return out

def _trace(skel, start, first, max_steps):
    """Walk the skeleton from `start` through `first`; returns the visited
    path (excluding start) and whether it stopped at a junction."""
    path = [first]
    visited = {start, first}
    cur = first
    for _ in range(max_steps - 1):
        nbrs = [q for q in _skeleton_neighbors(skel, *cur) if q not in visited]
        if len(nbrs) != 1:
            return path, len(nbrs) > 1
        cur = nbrs[0]
        visited.add(cur)
        path.append(cur)
    return path, False


def _prune_spurs(skel, min_spur):
    skel = skel.copy()
    for _ in range(4):
        cn = crossing_numbers(skel) * skel
        endpoints = np.argwhere(cn == 1)
        removed = False
        for r, c in endpoints:
            if not skel[r, c]:
                continue
            nbrs = _skeleton_neighbors(skel, r, c)
            if len(nbrs) != 1:
                continue
            path, hit_junction = _trace(skel, (r, c), nbrs[0], min_spur)
            if hit_junction and len(path) < min_spur:
                skel[r, c] = False
                for rr, cc in path[:-1]:
                    skel[rr, cc] = False
                # the trace stops one step early when the spur meets the
                # line diagonally; drop the last pixel too unless its
                # removal would break the remaining ridge (local CN > 1)
                lr, lc = path[-1]
                rest = [skel[lr + dr, lc + dc]
                        if 0 <= lr + dr < skel.shape[0] and 0 <= lc + dc < skel.shape[1]
                        else False for dr, dc in _CYCLE]
                cn_last = sum(abs(int(rest[i]) - int(rest[(i + 1) % 8]))
                              for i in range(8)) // 2
                if cn_last <= 1:
                    skel[lr, lc] = False
                removed = True
        if not removed:
            break
    return skel


def _direction(origin, target) -> float:
    dr = target[0] - origin[0]
    dc = target[1] - origin[1]
    return math.atan2(-dr, dc) % (2.0 * math.pi)


def _circular_diff(a, b) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _circular_mean(a, b) -> float:
    return math.atan2(
        (math.sin(a) + math.sin(b)) / 2.0, (math.cos(a) + math.cos(b)) / 2.0
    ) % (2.0 * math.pi)


def detect_minutiae(skeleton, mask, min_spur: int = 8, trace_steps: int = 8):
    skel = np.asarray(skeleton).astype(bool)
    m = as_mask(mask)
    check_same_shape(skel, m)
    if not np.array_equal(thin(skel), skel):
        raise ValueError("skeleton not thin")
    skel = _prune_spurs(skel, min_spur)
    cn = crossing_numbers(skel) * skel
    out = []
    for r, c in np.argwhere((cn == 1) | (cn == 3)):
        if not m[r, c]:
            continue
        branches = _skeleton_neighbors(skel, r, c)
        if cn[r, c] == 1:
            if not branches:
                continue
            path, _ = _trace(skel, (r, c), branches[0], trace_steps)
            out.append(Minutia(float(c), float(r),
                               _direction((r, c), path[-1]), MinutiaKind.ENDING))
        else:
            if len(branches) < 3:
                continue
            tangents = []
            for b in branches[:3]:
                path, _ = _trace(skel, (r, c), b, trace_steps)
                tangents.append(_direction((r, c), path[-1]))
            # mean of the two closest outward branch tangents: points into
            # the wedge between them, along the valley separating the fork
            pairs = [(0, 1), (0, 2), (1, 2)]
            i, j = min(pairs, key=lambda p: _circular_diff(tangents[p[0]], tangents[p[1]]))
            direction = _circular_mean(tangents[i], tangents[j])
            out.append(Minutia(float(c), float(r), direction, MinutiaKind.BIFURCATION))
    out.sort(key=lambda mi: (mi.y, mi.x))
    return out
