"""Minutiae correspondence, precision/recall/F1, threshold sweeps, and the
Tversky index as an image-agreement metric."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Minutia, as_mask, check_same_shape, erode_mask

TAU_D_DEFAULT = 14.0
TAU_THETA_DEFAULT = math.pi / 9.0
BOUNDARY_MARGIN_DEFAULT = 14.0


@dataclass(frozen=True)
class MatchCriteria:
    tau_d: float = TAU_D_DEFAULT
    tau_theta: float = TAU_THETA_DEFAULT
    type_mode: str = "exact"  # "exact" or "agnostic"

    def __post_init__(self):
        if self.tau_d <= 0:
            raise ValueError("tau_d must be > 0")
        if not 0.0 < self.tau_theta <= math.pi:
            raise ValueError("tau_theta must lie in (0, pi]")
        if self.type_mode not in ("exact", "agnostic"):
            raise ValueError("type_mode must be 'exact' or 'agnostic'")


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    precision: float = field(init=False)
    recall: float = field(init=False)
    f1: float = field(init=False)

    def __post_init__(self):
        tp, fp, fn = self.tp, self.fp, self.fn
        object.__setattr__(self, "precision", tp / (tp + fp) if tp + fp else 0.0)
        object.__setattr__(self, "recall", tp / (tp + fn) if tp + fn else 0.0)
        object.__setattr__(self, "f1", 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0)

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class TverskyParams:
    alpha: float = 0.7

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


def direction_difference(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)


def _admissible(p: Minutia, g: Minutia, crit: MatchCriteria):
    dist = math.hypot(p.x - g.x, p.y - g.y)
    if dist > crit.tau_d:
        return None
    if direction_difference(p.direction, g.direction) > crit.tau_theta:
        return None
    if crit.type_mode == "exact" and p.kind != g.kind:
        return None
    return dist


def match_minutiae(pred, gt, crit: MatchCriteria = MatchCriteria()):
    """Greedy one-to-one matching by ascending distance; ties broken by
    lower pred index, then lower gt index. Returns (pairs, unmatched_pred,
    unmatched_gt) where pairs is a list of (pred_index, gt_index)."""
    pred, gt = list(pred), list(gt)
    candidates = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            dist = _admissible(p, g, crit)
            if dist is not None:
                candidates.append((dist, i, j))
    candidates.sort()
    pred_free = [True] * len(pred)
    gt_free = [True] * len(gt)
    pairs = []
    for _, i, j in candidates:
        if pred_free[i] and gt_free[j]:
            pred_free[i] = gt_free[j] = False
            pairs.append((i, j))
    unmatched_pred = [i for i, f in enumerate(pred_free) if f]
    unmatched_gt = [j for j, f in enumerate(gt_free) if f]
    return pairs, unmatched_pred, unmatched_gt


def prf1(tp: int, fp: int, fn: int) -> EvalReport:
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    return EvalReport(tp=tp, fp=fp, fn=fn)


def evaluate_pair(pred, gt, crit: MatchCriteria = MatchCriteria()) -> EvalReport:
    pairs, up, ug = match_minutiae(pred, gt, crit)
    return prf1(len(pairs), len(up), len(ug))


def exclude_boundary(minutiae, mask, margin: float = BOUNDARY_MARGIN_DEFAULT):
    """Keep minutiae whose (rounded) position lies inside the mask eroded
    by `margin`; applied to predicted and ground-truth sets alike."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    m = as_mask(mask)
    inner = erode_mask(m, margin)
    out = []
    for mi in minutiae:
        r, c = int(round(mi.y)), int(round(mi.x))
        if 0 <= r < inner.shape[0] and 0 <= c < inner.shape[1] and inner[r, c]:
            out.append(mi)
    return out


def aggregate(pred_sets, gt_sets, crit: MatchCriteria = MatchCriteria()) -> EvalReport:
    """Micro-averaged evaluation: counts are summed over the whole set of
    images before computing the ratios."""
    if len(pred_sets) != len(gt_sets):
        raise ValueError("pred/gt list length mismatch")
    tp = fp = fn = 0
    for pred, gt in zip(pred_sets, gt_sets):
        pairs, up, ug = match_minutiae(pred, gt, crit)
        tp += len(pairs)
        fp += len(up)
        fn += len(ug)
    return prf1(tp, fp, fn)


def sweep(pred_sets, gt_sets, crit_base: MatchCriteria, axis: str, values):
    if axis not in ("tau_d", "tau_theta"):
        raise ValueError("axis must be 'tau_d' or 'tau_theta'")
    curve = []
    for v in values:
        crit = MatchCriteria(
            tau_d=v if axis == "tau_d" else crit_base.tau_d,
            tau_theta=v if axis == "tau_theta" else crit_base.tau_theta,
            type_mode=crit_base.type_mode,
        )
        curve.append((float(v), aggregate(pred_sets, gt_sets, crit)))
    return curve


def tversky_agreement(pred, truth, mask, params: TverskyParams = TverskyParams()):
    """Tversky index between a predicted and a reference enhanced image on
    the foreground; returns (index, tra, fra, fva)."""
    e = np.asarray(pred, dtype=np.float64)
    ehat = np.asarray(truth, dtype=np.float64)
    m = as_mask(mask)
    check_same_shape(e, ehat, m)
    if not np.any(m):
        raise ValueError("empty mask")
    s = m.astype(np.float64)
    tra = float(np.sum(e * ehat * s))
    fra = float(np.sum(e * (1.0 - ehat) * s))
    fva = float(np.sum((1.0 - e) * ehat * s))
    denom = tra + params.alpha * fra + (1.0 - params.alpha) * fva
    if denom == 0.0:
        # all three agreement terms vanish; score 0 when the reference has
        # ridge mass on the foreground (nothing of it was predicted)
        index = 0.0 if float(np.sum(ehat * s)) > 0.0 else 1.0
    else:
        index = tra / denom
    return index, tra, fra, fva


def tversky_loss(pred, truth, mask, params: TverskyParams = TverskyParams()) -> float:
    index, _, _, _ = tversky_agreement(pred, truth, mask, params)
    return 1.0 - index
