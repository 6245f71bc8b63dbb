"""Per-frame quality measures and cross-frame weight normalization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import FrameError, same_shape, to_grayscale

EPSILON = 1e-12
EXPOSURE_MEAN = 0.5
EXPOSURE_SIGMA = 0.2


@dataclass(frozen=True)
class QualityExponents:
    alpha_c: float = 1.0
    alpha_s: float = 1.0
    alpha_e: float = 1.0

    def __post_init__(self):
        for name in ("alpha_c", "alpha_s", "alpha_e"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


def contrast_map(frame: np.ndarray) -> np.ndarray:
    """Absolute 4-neighbour Laplacian response of the luminance, mirror borders."""
    gray = to_grayscale(frame)
    rows, cols = gray.shape
    # 'reflect' on a length-1 axis degenerates to edge repetition, which is
    # what a mirror of a single sample should give anyway.
    p = np.pad(gray, 1, mode="reflect" if min(rows, cols) > 1 else "edge")
    lap = p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * gray
    return np.abs(lap)


def saturation_map(frame: np.ndarray) -> np.ndarray:
    """Population standard deviation across the R, G, B samples of each pixel."""
    return np.asarray(frame, dtype=np.float64).std(axis=2)


def well_exposedness_map(frame: np.ndarray) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64)
    g = np.exp(-((frame - EXPOSURE_MEAN) ** 2) / (2.0 * EXPOSURE_SIGMA**2))
    return g.prod(axis=2)


def combine_quality(contrast, saturation, exposedness, exps: QualityExponents) -> np.ndarray:
    """``C**alpha_c * S**alpha_s * E**alpha_e`` with ``0**0 == 1``."""
    w = np.ones(np.shape(contrast))
    for alpha, measure in (
        (exps.alpha_c, contrast),
        (exps.alpha_s, saturation),
        (exps.alpha_e, exposedness),
    ):
        if alpha != 0:
            w = w * np.asarray(measure, dtype=np.float64) ** alpha
    return w


def quality_weight(frame: np.ndarray, exps: QualityExponents | None = None) -> np.ndarray:
    exps = exps or QualityExponents()
    shape = np.shape(frame)[:2]
    one = np.ones(shape)
    return combine_quality(
        contrast_map(frame) if exps.alpha_c else one,
        saturation_map(frame) if exps.alpha_s else one,
        well_exposedness_map(frame) if exps.alpha_e else one,
        exps,
    )


def normalize_weights(weights) -> list[np.ndarray]:
    """Regularized per-pixel normalization so the maps sum to one.

    Pixels where every map is zero fall back to uniform weights.
    """
    weights = [np.asarray(w, dtype=np.float64) for w in weights]
    same_shape(weights, "weight map")
    if any((w < 0).any() for w in weights):
        raise FrameError("weight maps must be non-negative")
    total = sum(w + EPSILON for w in weights)
    return [(w + EPSILON) / total for w in weights]
