"""Colour-selective blending masks.

Historical frames only contribute where their own pixels are close to a
target colour; the current frame always keeps its weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import FrameError, same_shape

MAX_RGB_DISTANCE = math.sqrt(3.0)


@dataclass(frozen=True)
class ColorTarget:
    color: tuple[float, float, float]
    threshold: float

    def __post_init__(self):
        if len(self.color) != 3 or not all(0.0 <= c <= 1.0 for c in self.color):
            raise ValueError(f"target colour must be three values in [0, 1], got {self.color}")
        if not (0.0 <= self.threshold <= MAX_RGB_DISTANCE):
            raise ValueError(
                f"colour threshold must be in [0, sqrt(3)], got {self.threshold}"
            )

    @classmethod
    def from_hex(cls, text: str, threshold: float) -> "ColorTarget":
        """Build a target from ``RRGGBB`` (optionally ``#``-prefixed)."""
        digits = text.lstrip("#")
        if len(digits) != 6:
            raise ValueError(f"expected a RRGGBB hex colour, got {text!r}")
        try:
            rgb = tuple(int(digits[i : i + 2], 16) / 255.0 for i in (0, 2, 4))
        except ValueError:
            raise ValueError(f"expected a RRGGBB hex colour, got {text!r}") from None
        return cls(rgb, threshold)


def color_mask(frame: np.ndarray, target: ColorTarget) -> np.ndarray:
    """1.0 where the pixel lies within ``target.threshold`` of the colour, else 0.0."""
    diff = np.asarray(frame, dtype=np.float64) - np.asarray(target.color)
    dist = np.sqrt((diff**2).sum(axis=2))
    return (dist <= target.threshold).astype(np.float64)


def apply_selective_mask(weights, masks, current_index: int) -> list[np.ndarray]:
    """Mask every non-current weight map and renormalize across the window.

    Masks may be soft (values in ``[0, 1]``).  The current frame's weight is
    strictly positive after regularized normalization, so the plain
    renormalization below never divides by zero.
    """
    weights = [np.asarray(w, dtype=np.float64) for w in weights]
    masks = [np.asarray(m, dtype=np.float64) for m in masks]
    if len(weights) != len(masks):
        raise FrameError(f"{len(weights)} weight maps but {len(masks)} masks")
    same_shape(weights + masks, "weight/mask map")
    if not -len(weights) <= current_index < len(weights):
        raise IndexError(f"current_index {current_index} outside window of {len(weights)}")
    current_index %= len(weights)
    if any(((m < 0) | (m > 1)).any() for m in masks):
        raise FrameError("mask values must lie in [0, 1]")

    masked = [
        w if k == current_index else w * m for k, (w, m) in enumerate(zip(weights, masks))
    ]
    total = sum(masked)
    if (total <= 0).any():
        raise FrameError("current frame weight must be positive everywhere")
    return [w / total for w in masked]
