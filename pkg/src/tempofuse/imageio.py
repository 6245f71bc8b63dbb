"""PNG / PPM frame codecs and sequence loading.

Samples are converted to floats in ``[0, 1]`` by dividing by the format
maximum (255, 65535, or the PPM maxval).  Writes go to a temporary file that
is renamed into place, so a failed run never leaves a truncated PNG behind.
"""

from __future__ import annotations

import glob
import os
import tempfile
from pathlib import Path
from typing import Iterator

import numpy as np
import png

from .imagecore import FrameError, as_frame

FRAME_SUFFIXES = (".png", ".ppm")


class FrameLoadError(FrameError):
    """A frame file is missing, unreadable, or inconsistent with its sequence."""


def read_png(path) -> np.ndarray:
    reader = png.Reader(filename=str(path))
    width, height, rows, info = reader.asDirect()
    planes = info["planes"]
    maxval = float(2 ** info["bitdepth"] - 1)
    data = np.vstack([np.asarray(r, dtype=np.float64) for r in rows])
    data = data.reshape(height, width, planes) / maxval
    if info["greyscale"]:
        data = np.repeat(data[..., :1], 3, axis=2)
    return data[..., :3]


def _ppm_tokens(buf: bytes, count: int):
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos : pos + 1].isspace():
            pos += 1
        if buf[pos : pos + 1] == b"#":
            while pos < len(buf) and buf[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos : pos + 1].isspace() and buf[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ValueError("truncated PPM header")
        tokens.append(buf[start:pos])
    # Exactly one whitespace byte separates the header from the raster.
    return tokens, pos + 1


def read_ppm(path) -> np.ndarray:
    """Decode a binary (P6) PPM with maxval up to 65535."""
    buf = Path(path).read_bytes()
    tokens, offset = _ppm_tokens(buf, 4)
    if tokens[0] != b"P6":
        raise ValueError(f"not a binary PPM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ValueError(f"bad PPM header: {width}x{height}, maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = width * height * 3
    if len(buf) < offset + n * dtype.itemsize:
        raise ValueError("truncated PPM raster")
    raster = np.frombuffer(buf, dtype=dtype, count=n, offset=offset)
    return raster.reshape(height, width, 3).astype(np.float64) / maxval


def read_frame(path) -> np.ndarray:
    suffix = Path(path).suffix.lower()
    try:
        if suffix == ".png":
            frame = read_png(path)
        elif suffix == ".ppm":
            frame = read_ppm(path)
        else:
            raise ValueError(f"unsupported frame format {suffix!r}")
        return as_frame(frame)
    except (OSError, ValueError, png.Error) as exc:
        raise FrameLoadError(f"cannot read frame {path}: {exc}") from exc


def find_frames(pattern) -> list[Path]:
    """Files matching a glob, or the PNG/PPM files of a directory, sorted by name."""
    pattern = str(pattern)
    if os.path.isdir(pattern):
        paths = [p for p in Path(pattern).iterdir() if p.suffix.lower() in FRAME_SUFFIXES]
    else:
        paths = [Path(p) for p in glob.glob(pattern)]
    paths = sorted((p for p in paths if p.is_file()), key=lambda p: p.name)
    if not paths:
        raise FrameLoadError(f"no frames match {pattern!r}")
    return paths


def load_frames(pattern) -> Iterator[np.ndarray]:
    """Lazily decode every frame matching ``pattern`` in filename order."""
    shape = None
    for path in find_frames(pattern):
        frame = read_frame(path)
        if shape is None:
            shape = frame.shape
        elif frame.shape != shape:
            raise FrameLoadError(
                f"{path} is {frame.shape[1]}x{frame.shape[0]}, "
                f"earlier frames are {shape[1]}x{shape[0]}"
            )
        yield frame


def quantize(values: np.ndarray, bit_depth: int) -> np.ndarray:
    """Map ``[0, 1]`` floats to integers, rounding halves up."""
    if bit_depth not in (8, 16):
        raise ValueError(f"bit depth must be 8 or 16, got {bit_depth}")
    top = 2**bit_depth - 1
    q = np.floor(np.clip(values, 0.0, 1.0) * top + 0.5)
    return q.astype(np.uint16 if bit_depth == 16 else np.uint8)


def _atomic_png(path, rows: np.ndarray, greyscale: bool, bit_depth: int) -> None:
    path = Path(path)
    height, width = rows.shape[0], rows.shape[1]
    writer = png.Writer(width, height, greyscale=greyscale, bitdepth=bit_depth)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            writer.write(fh, rows.reshape(height, -1))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_frame(frame: np.ndarray, path, bit_depth: int = 8) -> None:
    frame = as_frame(frame)
    _atomic_png(path, quantize(frame, bit_depth), greyscale=False, bit_depth=bit_depth)


def scale_map(values: np.ndarray) -> np.ndarray:
    """Min-max scale a map to 8-bit.

    Constant maps become mid-grey (128), except all-zero maps which stay
    black so an empty distinctness or mask map reads as "nothing here".
    """
    values = np.asarray(values, dtype=np.float64)
    lo, hi = values.min(), values.max()
    if hi <= lo:
        return np.full(values.shape, 0 if hi == 0 else 128, dtype=np.uint8)
    return quantize((values - lo) / (hi - lo), 8)


def dump_diagnostics(maps: dict, directory, frame_index: int) -> list[Path]:
    """Write each named map as ``<frame>_<feature>.png`` in ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for feature, values in maps.items():
        path = directory / f"{frame_index:06d}_{feature}.png"
        _atomic_png(path, scale_map(values), greyscale=True, bit_depth=8)
        written.append(path)
    return written
