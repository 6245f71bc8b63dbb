"""Temporal image fusion: long-exposure effects from registered frame sequences."""

from .fusion import (
    FusionParams,
    RunningMean,
    assemble_weights,
    distinctness_envelope,
    fuse_window,
    temporal_distinctness,
    temporal_profile,
    update_running_mean,
    virtual_exposure_time,
)
from .imagecore import FrameError, as_frame, clamp01, to_grayscale
from .pipeline import FusionJob, WindowBuffer, iter_video, run_photo, run_video
from .pyramid import (
    ImagePyramid,
    PyramidError,
    blend_pyramids,
    gaussian_pyramid,
    laplacian_pyramid,
    max_depth,
    reconstruct,
)
from .quality import (
    QualityExponents,
    contrast_map,
    normalize_weights,
    quality_weight,
    saturation_map,
    well_exposedness_map,
)
from .selective import ColorTarget, apply_selective_mask, color_mask

__version__ = "0.1.0"
