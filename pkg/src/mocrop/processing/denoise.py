"""Stage 1: Denoise-and-Merge (DM).

Suppresses static and near-static motion vectors by magnitude and pools a
clip's vectors across frames into one working set.  Optional global-motion
compensation removes a camera pan before the magnitude gate, so a panning
shot does not pass through the filter wholesale.

All functions are pure: they return new ``ClipMotionField`` objects.
"""

from __future__ import annotations

import logging
import math

from mocrop.models import ClipMotionField, MotionVector, magnitude

logger = logging.getLogger(__name__)


def epsilon_from_percentile(field: ClipMotionField, q: float) -> float:
    """Nearest-rank *q*-th percentile of the displacement magnitudes.

    The result is the value at 0-based index ``ceil(q/100 * n) - 1`` of the
    ascending magnitudes; ``q = 0`` returns the minimum.
    """
    if not len(field):
        raise ValueError("Cannot take a magnitude percentile of an empty clip")
    if not 0 <= q < 100:
        raise ValueError(f"Percentile must be in [0, 100), got {q}")
    ordered = sorted(magnitude(v) for v in field.vectors)
    rank = math.ceil(q * len(ordered) / 100)
    return ordered[max(rank - 1, 0)]


def filter_static(field: ClipMotionField, epsilon: float) -> ClipMotionField:
    """Keep vectors whose magnitude is strictly greater than *epsilon*."""
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    kept = [v for v in field.vectors if magnitude(v) > epsilon]
    logger.info(
        "Filtered %d -> %d motion vectors (epsilon=%.4f)", len(field), len(kept), epsilon
    )
    return field.with_vectors(kept)


def merge_frames(field: ClipMotionField) -> ClipMotionField:
    """Pool all frames of the clip into one working set.

    Density building ignores frame attribution, so merging is the identity
    on the vector sequence.  Co-located vectors from different frames are
    not deduplicated; each contributes one count.  ``frame_index`` is kept
    for diagnostics.
    """
    frames = {v.frame_index for v in field.vectors}
    logger.debug("Merged %d vectors from %d frames", len(field), len(frames))
    return field.with_vectors(field.vectors)


def _lower_median(values: list[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def global_motion_compensate(field: ClipMotionField) -> ClipMotionField:
    """Subtract the component-wise median displacement from every vector.

    Even counts use the lower median so the estimate is always a value
    present in the data.
    """
    if not len(field):
        return field
    dx_med = _lower_median([v.dx for v in field.vectors])
    dy_med = _lower_median([v.dy for v in field.vectors])
    compensated = [
        MotionVector(v.frame_index, v.x, v.y, v.dx - dx_med, v.dy - dy_med)
        for v in field.vectors
    ]
    logger.info("Global motion compensation: subtracted (%.3f, %.3f)", dx_med, dy_med)
    return field.with_vectors(compensated)
