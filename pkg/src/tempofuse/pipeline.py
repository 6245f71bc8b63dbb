"""Streaming drivers for video and long-exposure photo fusion.

Per-frame work (quality weights, distinctness, colour masks and the
Laplacian pyramid) is done once when a frame arrives and cached in a ring
buffer sized to the temporal window.  Only the temporal profile,
normalization and the weight pyramids are recomputed per output frame.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import numpy as np

from .fusion import (
    GAUSSIAN_PROFILE,
    UNIFORM_PROFILE,
    FusionParams,
    RunningMean,
    distinctness_envelope,
    temporal_distinctness,
    update_running_mean,
    window_profile,
)
from .imagecore import FrameError, as_frame, clamp01
from .pyramid import blend_pyramids, gaussian_pyramid, laplacian_pyramid, max_depth, reconstruct
from .quality import combine_quality, contrast_map, normalize_weights, saturation_map, well_exposedness_map
from .selective import ColorTarget, apply_selective_mask, color_mask

log = logging.getLogger(__name__)

VIDEO = "video"
PHOTO = "photo"

# Callback receiving (frame index, {feature name: map}) for diagnostics.
MapSink = Callable[[int, dict], None]


@dataclass(frozen=True)
class FrameArtifacts:
    """Everything about one input frame that window fusion reuses."""

    index: int
    frame: np.ndarray
    weight: np.ndarray  # envelope * quality, before the temporal profile
    pyramid: object
    mask: Optional[np.ndarray] = None
    maps: dict = field(default_factory=dict)


class WindowBuffer:
    """Fixed-capacity ring of :class:`FrameArtifacts`, oldest first.

    ``peak`` records the largest number of artifacts ever resident, which
    the streaming tests use as a memory counter.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"window capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._items: deque = deque()
        self.peak = 0

    def push(self, item: FrameArtifacts) -> Optional[FrameArtifacts]:
        """Append ``item``; return the evicted artifacts, if any."""
        evicted = self._items.popleft() if len(self._items) == self.capacity else None
        self._items.append(item)
        self.peak = max(self.peak, len(self._items))
        return evicted

    def get(self, index: int) -> Optional[FrameArtifacts]:
        for item in self._items:
            if item.index == index:
                return item
        return None

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(list(self._items))


@dataclass
class FusionJob:
    """A configured fusion run.

    ``frames`` is any iterable of RGB frames; ``sink`` (optional) receives
    each ``(index, frame)`` output.  In photo mode the single output has
    index 0.
    """

    frames: Iterable
    params: FusionParams = field(default_factory=FusionParams)
    mode: str = VIDEO
    selective: Optional[ColorTarget] = None
    sink: Optional[Callable[[int, np.ndarray], None]] = None
    diagnostics: Optional[MapSink] = None

    def __post_init__(self):
        if self.mode not in (VIDEO, PHOTO):
            raise ValueError(f"unknown mode {self.mode!r}")


class _Extractor:
    """Folds frames into the running mean and builds their artifacts."""

    def __init__(self, params: FusionParams, selective: Optional[ColorTarget], keep_maps: bool):
        self.params = params
        self.selective = selective
        self.keep_maps = keep_maps
        self.mean = RunningMean()
        self.shape = None
        self.depth = None

    def __call__(self, index: int, frame) -> FrameArtifacts:
        try:
            frame = as_frame(frame)
        except FrameError as exc:
            raise FrameError(f"frame {index}: {exc}") from None
        if self.shape is None:
            self.shape = frame.shape
            self.depth = self.params.depth_for(frame.shape)
            limit = max_depth(frame.shape)
            if self.depth > limit:
                raise ValueError(
                    f"pyramid depth {self.depth} exceeds max_depth {limit} "
                    f"for {frame.shape[0]}x{frame.shape[1]} frames"
                )
        elif frame.shape != self.shape:
            raise FrameError(
                f"frame {index} has size {frame.shape[1]}x{frame.shape[0]}, "
                f"expected {self.shape[1]}x{self.shape[0]}"
            )
        self.mean = update_running_mean(self.mean, frame)

        exps = self.params.exps
        maps = {}
        for name, alpha, measure in (
            ("contrast", exps.alpha_c, contrast_map),
            ("saturation", exps.alpha_s, saturation_map),
            ("exposedness", exps.alpha_e, well_exposedness_map),
        ):
            if alpha != 0 or self.keep_maps:
                maps[name] = measure(frame)
        one = np.ones(frame.shape[:2])
        weight = combine_quality(
            maps.get("contrast", one), maps.get("saturation", one), maps.get("exposedness", one), exps
        )
        if self.params.alpha_d != 0 or self.keep_maps:
            td = temporal_distinctness(frame, self.mean)
            maps["distinctness"] = td
            if self.params.alpha_d != 0:
                weight = weight * distinctness_envelope(td, self.params.alpha_d)
        mask = color_mask(frame, self.selective) if self.selective else None
        if mask is not None:
            maps["mask"] = mask
        return FrameArtifacts(
            index=index,
            frame=frame,
            weight=weight,
            pyramid=laplacian_pyramid(frame, self.depth),
            mask=mask,
            maps=maps if self.keep_maps else {},
        )


def _fuse(window: list, tau: float, profile: str, depth: int, diagnostics=None) -> np.ndarray:
    profile_w = window_profile(len(window), tau, profile)
    weights = normalize_weights([a.weight * p for a, p in zip(window, profile_w)])
    if window[-1].mask is not None:
        weights = apply_selective_mask(weights, [a.mask for a in window], len(window) - 1)
    if diagnostics is not None:
        current = window[-1]
        diagnostics(current.index, {**current.maps, "weight": weights[-1]})
    weight_pyramids = [gaussian_pyramid(w, depth) for w in weights]
    blended = blend_pyramids([a.pyramid for a in window], weight_pyramids)
    return clamp01(reconstruct(blended))


def iter_video(
    frames: Iterable,
    params: FusionParams,
    selective: Optional[ColorTarget] = None,
    diagnostics: Optional[MapSink] = None,
    buffer: Optional[WindowBuffer] = None,
) -> Iterator[np.ndarray]:
    """Yield one fused frame per input frame.

    Output ``t`` blends inputs ``max(0, t - tau) .. t``; early outputs use
    the truncated window with the same profile.
    """
    tau = int(params.tau)
    profile = params.profile or GAUSSIAN_PROFILE
    buffer = buffer if buffer is not None else WindowBuffer(tau + 1)
    if buffer.capacity != tau + 1:
        raise ValueError(f"buffer capacity {buffer.capacity} != tau + 1 = {tau + 1}")
    extract = _Extractor(params, selective, keep_maps=diagnostics is not None)
    for t, frame in enumerate(frames):
        buffer.push(extract(t, frame))
        yield _fuse(list(buffer), tau, profile, extract.depth, diagnostics)


def run_video(job: FusionJob, buffer: Optional[WindowBuffer] = None) -> int:
    """Run a video job, pushing outputs to ``job.sink``; return the output count."""
    if job.mode != VIDEO:
        raise ValueError(f"run_video needs a video job, got mode {job.mode!r}")
    count = 0
    for t, out in enumerate(
        iter_video(job.frames, job.params, job.selective, job.diagnostics, buffer)
    ):
        if job.sink is not None:
            job.sink(t, out)
        count += 1
        log.debug("fused frame %d", t)
    if count == 0:
        raise ValueError("no input frames")
    return count


def run_photo(job: FusionJob) -> np.ndarray:
    """Fuse the entire sequence into a single long exposure.

    The temporal profile is flat unless ``job.params.profile`` asks for a
    Gaussian, in which case it is anchored at the last frame with
    ``tau = K - 1``.
    """
    if job.mode != PHOTO:
        raise ValueError(f"run_photo needs a photo job, got mode {job.mode!r}")
    extract = _Extractor(job.params, job.selective, keep_maps=job.diagnostics is not None)
    window = [extract(k, f) for k, f in enumerate(job.frames)]
    if not window:
        raise ValueError("no input frames")
    profile = job.params.profile or UNIFORM_PROFILE
    out = _fuse(window, len(window) - 1, profile, extract.depth, job.diagnostics)
    if job.sink is not None:
        job.sink(0, out)
    return out


def photo_exposure_time(count: int, interval: float) -> float:
    """Approximate virtual exposure of a photo blend: shot count times interval."""
    return count * interval
