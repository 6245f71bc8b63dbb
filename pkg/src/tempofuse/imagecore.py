"""Raster helpers shared by the rest of the package.

Frames are ``(height, width, 3)`` float64 arrays holding RGB intensities in
``[0, 1]``.  Single-channel maps (weights, quality measures, distinctness)
are ``(height, width)`` float64 arrays.
"""

from __future__ import annotations

import numpy as np

# ITU-R BT.601 luma coefficients.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


class FrameError(ValueError):
    """Raised for malformed frames or maps."""


def as_frame(data, *, copy: bool = False) -> np.ndarray:
    """Validate ``data`` as an RGB frame and return it as float64.

    Raises:
        FrameError: wrong shape, empty, non-finite or out-of-range samples.
    """
    frame = np.array(data, dtype=np.float64, copy=copy)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise FrameError(f"expected an (H, W, 3) frame, got shape {frame.shape}")
    if frame.shape[0] < 1 or frame.shape[1] < 1:
        raise FrameError(f"frame must be at least 1x1, got {frame.shape[:2]}")
    _check_finite(frame)
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise FrameError("frame samples must lie in [0, 1]")
    return frame


def _check_finite(arr: np.ndarray) -> None:
    bad = ~np.isfinite(arr)
    if bad.any():
        loc = tuple(int(i) for i in np.argwhere(bad)[0])
        raise FrameError(f"non-finite sample {arr[loc]!r} at (row, col, ...) = {loc}")


def to_grayscale(frame: np.ndarray) -> np.ndarray:
    """Luminance of an RGB frame as a single-channel map."""
    return np.asarray(frame, dtype=np.float64) @ LUMA_WEIGHTS


def clamp01(frame: np.ndarray) -> np.ndarray:
    """Clip samples into ``[0, 1]``; non-finite samples are an error."""
    arr = np.asarray(frame, dtype=np.float64)
    _check_finite(arr)
    return np.clip(arr, 0.0, 1.0)


def same_shape(maps, what: str = "map") -> tuple[int, ...]:
    """Return the common shape of ``maps`` or raise naming the first mismatch."""
    shape = None
    for i, m in enumerate(maps):
        if shape is None:
            shape = np.shape(m)
        elif np.shape(m) != shape:
            raise FrameError(f"{what} {i} has shape {np.shape(m)}, expected {shape}")
    if shape is None:
        raise FrameError(f"need at least one {what}")
    return shape
