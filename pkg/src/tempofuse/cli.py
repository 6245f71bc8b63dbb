"""``tempofuse`` command line front end.

All pixel work happens in :mod:`tempofuse.pipeline`; this module only maps
flags onto a :class:`~tempofuse.pipeline.FusionJob` and handles files.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .fusion import GAUSSIAN_PROFILE, UNIFORM_PROFILE, FusionParams, virtual_exposure_time
from .imageio import dump_diagnostics, find_frames, load_frames, write_frame
from .imagecore import FrameError
from .pipeline import PHOTO, VIDEO, FusionJob, photo_exposure_time, run_photo, run_video
from .pyramid import PyramidError
from .quality import QualityExponents
from .selective import ColorTarget

log = logging.getLogger("tempofuse")

DEFAULT_TAU = 25
DEFAULT_FPS = 30.0
DEFAULT_COLOR_THRESHOLD = 0.3


@dataclass(frozen=True)
class CliConfig:
    input_pattern: str
    output_dir: Path
    mode: str
    params: FusionParams
    selective: Optional[ColorTarget]
    bit_depth: int = 8
    dump_maps: bool = False
    quiet: bool = False

    @property
    def tau(self):
        return self.params.tau

    @property
    def fps(self):
        return self.params.fps


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tempofuse",
        description="Temporal image fusion of registered frame sequences.",
    )
    p.add_argument("--input", required=True, dest="input_pattern",
                   help="glob pattern or directory of PNG/PPM frames")
    p.add_argument("--output", required=True, type=Path, dest="output_dir")
    p.add_argument("--mode", choices=(VIDEO, PHOTO), default=VIDEO)
    p.add_argument("--tau", type=int, default=DEFAULT_TAU,
                   help="frames blended before the current one (video mode)")
    p.add_argument("--fps", type=float, default=DEFAULT_FPS)
    p.add_argument("--alpha-c", type=float, default=1.0, help="contrast exponent")
    p.add_argument("--alpha-s", type=float, default=1.0, help="saturation exponent")
    p.add_argument("--alpha-e", type=float, default=1.0, help="well-exposedness exponent")
    p.add_argument("--alpha-d", type=float, default=0.0,
                   help="temporal distinctness gain; >0 enhances, <0 suppresses transients")
    p.add_argument("--color", help="RRGGBB target colour for selective blending")
    p.add_argument("--color-threshold", type=float, default=DEFAULT_COLOR_THRESHOLD,
                   help="max Euclidean RGB distance (in [0, sqrt(3)]) to the target")
    p.add_argument("--depth", type=int, help="pyramid levels (default: deepest minus one)")
    p.add_argument("--profile", choices=(GAUSSIAN_PROFILE, UNIFORM_PROFILE),
                   help="temporal profile (default: gaussian for video, uniform for photo)")
    p.add_argument("--bit-depth", type=int, choices=(8, 16), default=8)
    p.add_argument("--dump-maps", action="store_true",
                   help="also write per-frame feature and weight maps under OUTPUT/maps")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> CliConfig:
    """Parse and validate ``argv``; invalid values exit with a usage error."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        params = FusionParams(
            tau=ns.tau,
            fps=ns.fps,
            alpha_d=ns.alpha_d,
            exps=QualityExponents(ns.alpha_c, ns.alpha_s, ns.alpha_e),
            depth=ns.depth,
            profile=ns.profile,
        )
        selective = (
            ColorTarget.from_hex(ns.color, ns.color_threshold) if ns.color else None
        )
    except ValueError as exc:
        parser.error(str(exc))
    return CliConfig(
        input_pattern=ns.input_pattern,
        output_dir=ns.output_dir,
        mode=ns.mode,
        params=params,
        selective=selective,
        bit_depth=ns.bit_depth,
        dump_maps=ns.dump_maps,
        quiet=ns.quiet,
    )


def run(config: CliConfig) -> int:
    """Execute a parsed configuration; return the number of frames written."""
    paths = find_frames(config.input_pattern)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    maps_dir = out_dir / "maps"
    diagnostics = (
        (lambda index, maps: dump_diagnostics(maps, maps_dir, index))
        if config.dump_maps
        else None
    )

    if config.mode == VIDEO:
        total = len(paths)

        def sink(t, frame):
            write_frame(frame, out_dir / f"R_{t:06d}.png", config.bit_depth)
            log.info("frame %d/%d", t + 1, total)

        log.info(
            "video: %d frames, tau=%d, virtual exposure %.4f s",
            total, config.tau, virtual_exposure_time(config.tau, config.fps),
        )
        job = FusionJob(load_frames(config.input_pattern), config.params, VIDEO,
                        config.selective, sink, diagnostics)
        return run_video(job)

    job = FusionJob(load_frames(config.input_pattern), config.params, PHOTO,
                    config.selective, None, diagnostics)
    out = run_photo(job)
    write_frame(out, out_dir / "blend.png", config.bit_depth)
    log.info(
        "photo: blended %d frames, approx. virtual exposure %.4f s (assuming %g shots/s)",
        len(paths), photo_exposure_time(len(paths), 1.0 / config.fps), config.fps,
    )
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if config.quiet else logging.INFO,
        format="%(name)s: %(message)s",
    )
    try:
        run(config)
    except (FrameError, PyramidError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
