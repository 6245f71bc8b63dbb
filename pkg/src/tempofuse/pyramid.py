"""Gaussian / Laplacian pyramids and multi-band blending.

Smoothing uses the separable binomial kernel ``[1, 4, 6, 4, 1] / 16`` with
mirror borders (reflection that does not repeat the edge sample).  Level
``l + 1`` has dimensions ``ceil(dims(l) / 2)`` so any frame size works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

GAUSSIAN = "gaussian"
LAPLACIAN = "laplacian"


class PyramidError(ValueError):
    pass


@dataclass(frozen=True)
class ImagePyramid:
    """Levels ordered fine to coarse; level 0 is full resolution."""

    levels: tuple
    kind: str

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]


def max_depth(shape: Sequence[int]) -> int:
    """Deepest pyramid for an image of ``shape`` (rows, cols, ...)."""
    smallest = min(shape[0], shape[1])
    if smallest < 1:
        raise PyramidError(f"image must be at least 1x1, got {tuple(shape[:2])}")
    return int(math.floor(math.log2(smallest))) + 1


def default_depth(shape: Sequence[int]) -> int:
    return max(1, max_depth(shape) - 1)


def _check_depth(shape, depth: int) -> None:
    limit = max_depth(shape)
    if depth < 1 or depth > limit:
        raise PyramidError(
            f"pyramid depth {depth} is invalid for a {shape[0]}x{shape[1]} image "
            f"(max_depth is {limit})"
        )


def _filter_axis(arr: np.ndarray, axis: int, kernel: np.ndarray) -> np.ndarray:
    n = arr.shape[axis]
    if n == 1:
        # A mirror of a single sample is that sample; a normalized kernel is identity.
        return arr * kernel.sum()
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (2, 2)
    padded = np.pad(arr, pad, mode="reflect")
    out = np.zeros_like(arr)
    for tap, w in enumerate(kernel):
        out += w * np.take(padded, np.arange(tap, tap + n), axis=axis)
    return out


def blur(image: np.ndarray) -> np.ndarray:
    """Separable binomial low-pass filter over the two spatial axes."""
    return _filter_axis(_filter_axis(image, 0, KERNEL), 1, KERNEL)


def downsample(image: np.ndarray) -> np.ndarray:
    """Blur then keep every other row and column."""
    return blur(image)[::2, ::2]


def upsample(image: np.ndarray, shape: Sequence[int]) -> np.ndarray:
    """Expand ``image`` to ``shape[:2]`` by zero insertion and interpolation."""
    rows, cols = shape[0], shape[1]
    if (rows + 1) // 2 != image.shape[0] or (cols + 1) // 2 != image.shape[1]:
        raise PyramidError(
            f"cannot upsample {image.shape[:2]} to {(rows, cols)}: not a ceil-half pair"
        )
    out = np.zeros((rows, cols) + image.shape[2:], dtype=np.float64)
    out[::2, ::2] = image
    if rows > 1:
        out = _filter_axis(out, 0, 2.0 * KERNEL)
    if cols > 1:
        out = _filter_axis(out, 1, 2.0 * KERNEL)
    return out


def gaussian_pyramid(image: np.ndarray, depth: int) -> ImagePyramid:
    image = np.asarray(image, dtype=np.float64)
    _check_depth(image.shape, depth)
    levels = [image]
    for _ in range(depth - 1):
        levels.append(downsample(levels[-1]))
    return ImagePyramid(tuple(levels), GAUSSIAN)


def laplacian_pyramid(image: np.ndarray, depth: int) -> ImagePyramid:
    """Band-pass levels plus the coarsest Gaussian level as residual."""
    gauss = gaussian_pyramid(image, depth).levels
    levels = [
        fine - upsample(coarse, fine.shape) for fine, coarse in zip(gauss[:-1], gauss[1:])
    ]
    levels.append(gauss[-1])
    return ImagePyramid(tuple(levels), LAPLACIAN)


def reconstruct(pyramid: ImagePyramid) -> np.ndarray:
    """Collapse a Laplacian pyramid back into an image."""
    if pyramid.kind != LAPLACIAN:
        raise PyramidError(f"can only reconstruct a laplacian pyramid, got {pyramid.kind}")
    running = pyramid.levels[-1]
    for level in reversed(pyramid.levels[:-1]):
        running = upsample(running, level.shape) + level
    return running


def blend_pyramids(image_pyramids, weight_pyramids) -> ImagePyramid:
    """Per-level weighted sum of Laplacian image pyramids.

    Each single-channel weight level is broadcast over the image channels.
    """
    image_pyramids = list(image_pyramids)
    weight_pyramids = list(weight_pyramids)
    if not image_pyramids:
        raise PyramidError("need at least one pyramid to blend")
    if len(image_pyramids) != len(weight_pyramids):
        raise PyramidError(
            f"{len(image_pyramids)} image pyramids but {len(weight_pyramids)} weight pyramids"
        )
    depth = image_pyramids[0].depth
    for k, (ip, wp) in enumerate(zip(image_pyramids, weight_pyramids)):
        if ip.kind != LAPLACIAN or wp.kind != GAUSSIAN:
            raise PyramidError(f"pair {k}: expected laplacian images and gaussian weights")
        if ip.depth != depth or wp.depth != depth:
            raise PyramidError(f"pair {k}: depth mismatch (expected {depth})")

    blended = []
    for lvl in range(depth):
        ref = image_pyramids[0].levels[lvl].shape
        acc = np.zeros(ref, dtype=np.float64)
        for k, (ip, wp) in enumerate(zip(image_pyramids, weight_pyramids)):
            img, w = ip.levels[lvl], wp.levels[lvl]
            if img.shape != ref or w.shape != ref[:2]:
                raise PyramidError(
                    f"level {lvl}, pyramid {k}: image {img.shape} / weight {w.shape} "
                    f"do not match {ref}"
                )
            acc += (w[..., None] if img.ndim == 3 else w) * img
        blended.append(acc)
    return ImagePyramid(tuple(blended), LAPLACIAN)


__all__ = [
    "ImagePyramid",
    "PyramidError",
    "blend_pyramids",
    "blur",
    "default_depth",
    "downsample",
    "gaussian_pyramid",
    "laplacian_pyramid",
    "max_depth",
    "reconstruct",
    "upsample",
]
