"""Synthetic ridge patterns and skeletons for testing and benchmarking."""

from __future__ import annotations

import math

import numpy as np

from .core import fold_angle


def _phase(shape, period: float, theta: float, phase: float = 0.0):
    h, w = shape
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    t = cc * math.sin(theta) + rr * math.cos(theta)
    return 2.0 * math.pi * t / period + phase


def sinusoid(shape, period: float, theta: float, amplitude: float = 100.0,
             mean: float = 128.0, phase: float = 0.0) -> np.ndarray:
    """Ideal ridge pattern: dark ridges (intensity dips) at cosine crests,
    ridge orientation theta, inter-ridge period in pixels."""
    values = mean - amplitude * np.cos(_phase(shape, period, theta, phase))
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def ridge_indicator(shape, period: float, theta: float, phase: float = 0.0) -> np.ndarray:
    """Analytic binary enhancement truth for `sinusoid`: 1 where the cosine
    phase is positive (ridge), 0 elsewhere."""
    return (np.cos(_phase(shape, period, theta, phase)) > 0.0).astype(np.float64)


def constant_fields(shape, period: float, theta: float):
    orient = np.full(shape, fold_angle(theta), dtype=np.float64)
    freq = np.full(shape, 1.0 / period, dtype=np.float64)
    return orient, freq


def parallel_line_skeleton(shape, spacing: int, offset: int = 0) -> np.ndarray:
    """Vertical 1-pixel lines every `spacing` columns (ridge orientation
    pi/2), as a white-on-black uint8 skeleton."""
    skel = np.zeros(shape, dtype=np.uint8)
    skel[:, offset::spacing] = 255
    return skel


def concentric_arc_skeleton(shape, spacing: float, center=None):
    """Concentric circular arcs with the given radial spacing, plus the
    tangential orientation field."""
    h, w = shape
    if center is None:
        center = ((h - 1) / 2.0, (w - 1) / 2.0)
    rr, cc = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    radius = np.hypot(rr - center[0], cc - center[1])
    skel = (np.abs(np.mod(radius + spacing / 2.0, spacing) - spacing / 2.0) < 0.5)
    # tangent direction is perpendicular to the radial direction
    radial = np.arctan2(-(rr - center[0]), cc - center[1])
    orient = fold_angle(radial + math.pi / 2.0)
    return (skel * 255).astype(np.uint8), orient


def add_noise(image, sigma: float, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    noisy = image.astype(np.float64) + rng.normal(0.0, sigma, image.shape)
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
