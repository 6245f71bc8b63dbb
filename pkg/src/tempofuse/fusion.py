"""Temporal weighting and single-window fusion.

A window holds frames ``t - tau .. t`` in time order.  Each frame gets a
weight map

    W_k = exp(alpha_d * TD_k) * C**alpha_c * S**alpha_s * E**alpha_e * T(k, t)

where ``TD_k`` is the temporal distinctness of frame ``k`` against the
running mean of every frame up to and including ``k`` and ``T`` is a
Gaussian falloff with ``sigma = tau / 3``.  Maps are normalized across the
window and the frames are blended band by band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .imagecore import FrameError, clamp01
from .pyramid import blend_pyramids, default_depth, gaussian_pyramid, laplacian_pyramid, reconstruct
from .quality import QualityExponents, normalize_weights, quality_weight

MAX_ABS_ALPHA_D = 500.0

GAUSSIAN_PROFILE = "gaussian"
UNIFORM_PROFILE = "uniform"


@dataclass(frozen=True)
class FusionParams:
    """User-facing knobs for temporal fusion.

    ``fps`` is ``None`` for photographic sequences.  ``depth`` of ``None``
    picks the deepest stable pyramid for the frame size, and ``profile`` of
    ``None`` lets the caller pick (Gaussian for video, uniform for photos).
    """

    tau: int = 25
    fps: Optional[float] = 30.0
    alpha_d: float = 0.0
    exps: QualityExponents = field(default_factory=QualityExponents)
    depth: Optional[int] = None
    profile: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.tau) or self.tau < 0:
            raise ValueError(f"tau must be a finite frame count >= 0, got {self.tau}")
        if self.fps is not None and not (math.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if not math.isfinite(self.alpha_d) or abs(self.alpha_d) > MAX_ABS_ALPHA_D:
            raise ValueError(
                f"|alpha_d| must be <= {MAX_ABS_ALPHA_D:g}, got {self.alpha_d}"
            )
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.profile not in (None, GAUSSIAN_PROFILE, UNIFORM_PROFILE):
            raise ValueError(f"unknown temporal profile {self.profile!r}")

    @property
    def sigma(self) -> float:
        return profile_sigma(self.tau)

    def depth_for(self, shape) -> int:
        return self.depth if self.depth is not None else default_depth(shape)


def profile_sigma(tau: float) -> float:
    return tau / 3.0 if tau > 0 else 1.0


def temporal_profile(k: int, t: int, tau: float) -> float:
    """Gaussian weight of frame ``k`` in the window ending at frame ``t``."""
    if not t - tau <= k <= t:
        raise ValueError(f"frame {k} is outside the window [{t - tau}, {t}]")
    sigma = profile_sigma(tau)
    return math.exp(-((t - k) ** 2) / (2.0 * sigma * sigma))


def virtual_exposure_time(tau: float, fps: float) -> float:
    """Simulated exposure, in seconds, of a video frame fused over ``tau + 1`` frames."""
    if not fps > 0:
        raise ValueError(f"fps must be > 0, got {fps}")
    return (tau + 1) / fps


@dataclass(frozen=True)
class RunningMean:
    count: int = 0
    mean: Optional[np.ndarray] = None


def update_running_mean(state: RunningMean, frame: np.ndarray) -> RunningMean:
    frame = np.asarray(frame, dtype=np.float64)
    if state.count == 0 or state.mean is None:
        return RunningMean(1, frame.copy())
    if frame.shape != state.mean.shape:
        raise FrameError(
            f"frame shape {frame.shape} does not match running mean {state.mean.shape}"
        )
    count = state.count + 1
    return RunningMean(count, state.mean + (frame - state.mean) / count)


def temporal_distinctness(frame: np.ndarray, mean: RunningMean) -> np.ndarray:
    """Largest per-channel deviation from the running mean, min-max scaled.

    A map with no spread (e.g. a frame equal to the mean) becomes all zeros.
    """
    if mean.count < 1 or mean.mean is None:
        raise FrameError("temporal distinctness needs a running mean of at least one frame")
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape != mean.mean.shape:
        raise FrameError(f"frame shape {frame.shape} does not match mean {mean.mean.shape}")
    td = np.abs(frame - mean.mean).max(axis=2)
    lo, hi = td.min(), td.max()
    if hi <= lo:
        return np.zeros_like(td)
    return (td - lo) / (hi - lo)


def distinctness_envelope(td: np.ndarray, alpha_d: float) -> np.ndarray:
    return np.exp(alpha_d * np.asarray(td, dtype=np.float64))


def window_profile(n: int, tau: float, profile: Optional[str] = GAUSSIAN_PROFILE) -> np.ndarray:
    """Temporal weights for the ``n`` most recent frames, oldest first."""
    if profile == UNIFORM_PROFILE:
        return np.ones(n)
    t = n - 1
    return np.array([temporal_profile(k, t, tau) for k in range(n)])


def frame_weight(frame: np.ndarray, mean: RunningMean, params: FusionParams) -> np.ndarray:
    """Window-independent part of a frame's weight: envelope times quality."""
    w = quality_weight(frame, params.exps)
    if params.alpha_d != 0:
        w = w * distinctness_envelope(temporal_distinctness(frame, mean), params.alpha_d)
    return w


def assemble_weights(
    frames: Sequence[np.ndarray],
    t: int,
    params: FusionParams,
    means: Sequence[RunningMean],
) -> list[np.ndarray]:
    """Normalized weight maps for a window whose last frame has index ``t``.

    ``means[i]`` is the running mean snapshot taken right after ``frames[i]``
    was folded in.
    """
    if len(frames) != len(means):
        raise ValueError(f"{len(frames)} frames but {len(means)} running-mean snapshots")
    if not frames:
        raise ValueError("empty window")
    if len(frames) > params.tau + 1 and params.profile != UNIFORM_PROFILE:
        raise ValueError(f"window of {len(frames)} frames exceeds tau + 1 = {params.tau + 1}")
    n = len(frames)
    profile = window_profile(n, params.tau, params.profile)
    raw = [
        frame_weight(f, m, params) * profile[i]
        for i, (f, m) in enumerate(zip(frames, means))
    ]
    return normalize_weights(raw)


def fuse_window(
    frames: Sequence[np.ndarray],
    weights: Sequence[np.ndarray],
    depth: Optional[int] = None,
    image_pyramids=None,
) -> np.ndarray:
    """Blend ``frames`` with normalized ``weights`` through Laplacian pyramids.

    ``image_pyramids`` may carry precomputed Laplacian pyramids of ``frames``.
    """
    if len(frames) != len(weights):
        raise ValueError(f"{len(frames)} frames but {len(weights)} weight maps")
    if not frames:
        raise ValueError("empty window")
    shape = np.shape(frames[0])
    if depth is None:
        depth = default_depth(shape)
    if image_pyramids is None:
        image_pyramids = [laplacian_pyramid(f, depth) for f in frames]
    weight_pyramids = [gaussian_pyramid(w, depth) for w in weights]
    return clamp01(reconstruct(blend_pyramids(image_pyramids, weight_pyramids)))
