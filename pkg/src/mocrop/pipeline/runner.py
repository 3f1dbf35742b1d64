"""End-to-end MoCrop pipeline: motion vectors in, one clip-level crop out.

Stages::

    merge_frames -> [global_motion_compensate] -> [filter_static]
        -> [mc_sample] -> build_md_map -> (flat? center fallback)
        -> enumerate_shapes -> search -> grid_to_normalized
        -> normalized_to_pixels

Bracketed stages are config toggles, so the component ablation grid is a
loop over configs rather than separate builds.
"""

from __future__ import annotations

import logging

from mocrop.config import MoCropConfig
from mocrop.errors import DegenerateBoxError
from mocrop.modeling.geometry import (
    center_crop_box,
    crop_frame,
    grid_to_normalized,
    normalized_to_pixels,
    pixels_to_normalized,
)
from mocrop.modeling.search import enumerate_shapes, search
from mocrop.models import (
    ClipMotionField,
    CropDecision,
    CropMode,
    Frame,
    MotionDensityMap,
)
from mocrop.processing.denoise import (
    epsilon_from_percentile,
    filter_static,
    global_motion_compensate,
    merge_frames,
)
from mocrop.processing.density import build_md_map, is_flat, mc_sample

logger = logging.getLogger(__name__)


def resolve_epsilon(field: ClipMotionField, cfg: MoCropConfig) -> float:
    """The magnitude threshold: the fixed value, or the configured percentile."""
    if cfg.epsilon is not None:
        return cfg.epsilon
    assert cfg.epsilon_percentile is not None
    if not len(field):
        return 0.0
    return epsilon_from_percentile(field, cfg.epsilon_percentile)


def denoise_and_sample(field: ClipMotionField, cfg: MoCropConfig) -> ClipMotionField:
    """Stages 1-2 up to (not including) map construction."""
    working = merge_frames(field)
    if cfg.enable_gmc:
        working = global_motion_compensate(working)
    if cfg.enable_dm:
        working = filter_static(working, resolve_epsilon(working, cfg))
    if cfg.enable_mcs:
        working = mc_sample(working, cfg.sample_budget, cfg.seed)
    return working


def center_fallback(
    frame_size: tuple[int, int],
    md_map: MotionDensityMap,
    alpha: float,
) -> CropDecision:
    """The safe default when the map carries no usable concentration."""
    pixel = center_crop_box(frame_size, alpha)
    return CropDecision(
        normalized=pixels_to_normalized(pixel, frame_size),
        pixel=pixel,
        mode=CropMode.CENTER_FALLBACK,
        score=0,
        md_map=md_map,
    )


def run_mocrop(field: ClipMotionField, cfg: MoCropConfig) -> CropDecision:
    """Compute the single crop decision ``B*`` for one clip."""
    logger.info("Running MoCrop on clip %r with %d vectors", field.clip_id, len(field))

    sampled = denoise_and_sample(field, cfg)
    md_map = build_md_map(sampled, cfg.grid)

    if md_map.total == 0:
        logger.warning("Clip %r has no motion after filtering; using center crop", field.clip_id)
        return center_fallback(field.frame_size, md_map, cfg.alpha)
    if cfg.flat_fallback and is_flat(md_map, cfg.flatness_threshold):
        logger.warning("Clip %r has a flat MD map; using center crop", field.clip_id)
        return center_fallback(field.frame_size, md_map, cfg.alpha)

    shapes = enumerate_shapes(cfg.grid, cfg.alpha, cfg.delta)
    grid_box, score = search(md_map, shapes, cfg.backend)
    normalized = grid_to_normalized(grid_box, cfg.grid)
    try:
        pixel = normalized_to_pixels(normalized, field.frame_size)
    except DegenerateBoxError as exc:
        logger.warning("Clip %r: %s; using center crop", field.clip_id, exc)
        return center_fallback(field.frame_size, md_map, cfg.alpha)

    return CropDecision(
        normalized=normalized,
        pixel=pixel,
        mode=CropMode.ADAPTIVE,
        score=score,
        md_map=md_map,
        grid_box=grid_box,
    )


def apply_decision(decision: CropDecision, frames: list[Frame]) -> list[Frame]:
    """Crop every frame of the clip with the same box."""
    cropped = [crop_frame(frame, decision.pixel) for frame in frames]
    logger.info(
        "Cropped %d frames to %dx%d", len(cropped), decision.pixel.width, decision.pixel.height
    )
    return cropped
