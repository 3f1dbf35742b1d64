"""Box geometry: grid -> normalized -> pixels, frame cropping, FLOPs arithmetic.

Every area parameter ``alpha`` here is an *area* ratio, consistent with the
cell-area band of the search, so a center crop at ``alpha`` has side scale
``sqrt(alpha)``.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from mocrop.errors import DegenerateBoxError, ValidationError
from mocrop.models import Frame, GridBox, GridSpec, NormalizedBox, PixelBox

logger = logging.getLogger(__name__)


def grid_to_normalized(box: GridBox, grid: GridSpec) -> NormalizedBox:
    """Convert a cell rectangle to ``(c_x, c_y, w_b, h_b)``."""
    if not box.fits(grid):
        raise ValidationError(f"{box} does not fit a {grid} grid")
    return NormalizedBox(
        cx=(box.j + box.width / 2) / grid.cols,
        cy=(box.i + box.height / 2) / grid.rows,
        w=box.width / grid.cols,
        h=box.height / grid.rows,
    )


def normalized_to_pixels(box: NormalizedBox, frame_size: tuple[int, int]) -> PixelBox:
    """Map a normalized box to clamped pixel corners.

    ``x1 = max(0, floor((c_x - w_b/2) W))``, ``x2 = min(W, floor((c_x + w_b/2) W))``
    and likewise for y.  Raises ``DegenerateBoxError`` when the floor
    collapses a side to zero pixels.
    """
    width, height = frame_size
    if width < 1 or height < 1:
        raise ValidationError(f"Frame size must be positive, got {width}x{height}")
    x1 = max(0, math.floor((box.cx - box.w / 2) * width))
    y1 = max(0, math.floor((box.cy - box.h / 2) * height))
    x2 = min(width, math.floor((box.cx + box.w / 2) * width))
    y2 = min(height, math.floor((box.cy + box.h / 2) * height))
    if x1 >= x2 or y1 >= y2:
        raise DegenerateBoxError(
            f"Box {box} maps to empty pixel box ({x1}, {y1}, {x2}, {y2}) "
            f"on a {width}x{height} frame"
        )
    return PixelBox(x1, y1, x2, y2)


def pixels_to_normalized(box: PixelBox, frame_size: tuple[int, int]) -> NormalizedBox:
    """Normalized description of a pixel box (used for fallback decisions)."""
    width, height = frame_size
    return NormalizedBox(
        cx=(box.x1 + box.x2) / 2 / width,
        cy=(box.y1 + box.y2) / 2 / height,
        w=box.width / width,
        h=box.height / height,
    )


def crop_frame(frame: Frame, box: PixelBox) -> Frame:
    """``I[y1:y2, x1:x2]``, byte-exact."""
    if not box.within(frame.size):
        raise ValidationError(
            f"Crop ({box.x1}, {box.y1}, {box.x2}, {box.y2}) exceeds "
            f"{frame.width}x{frame.height} frame"
        )
    return Frame.from_array(frame.array()[box.y1 : box.y2, box.x1 : box.x2])


def center_crop_box(frame_size: tuple[int, int], alpha: float) -> PixelBox:
    """Centered box covering about ``alpha`` of the frame area."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    width, height = frame_size
    scale = math.sqrt(alpha)
    crop_w = math.floor(width * scale)
    crop_h = math.floor(height * scale)
    if crop_w < 1 or crop_h < 1:
        raise DegenerateBoxError(
            f"Center crop at alpha={alpha} has no pixels on a {width}x{height} frame"
        )
    x1 = (width - crop_w) // 2
    y1 = (height - crop_h) // 2
    return PixelBox(x1, y1, x1 + crop_w, y1 + crop_h)


def random_crop_box(
    frame_size: tuple[int, int],
    alpha: float,
    rng: np.random.Generator,
) -> PixelBox:
    """Box the size of ``center_crop_box`` at a uniformly random position."""
    center = center_crop_box(frame_size, alpha)
    width, height = frame_size
    x1 = int(rng.integers(0, width - center.width + 1))
    y1 = int(rng.integers(0, height - center.height + 1))
    return PixelBox(x1, y1, x1 + center.width, y1 + center.height)


# ---------------------------------------------------------------------------
# Inference cost
# ---------------------------------------------------------------------------


def flops_ratio(res_out: int, res_in: int) -> float:
    """Fractional FLOPs reduction from resizing *res_in* inputs to *res_out*.

    Quadratic input-area model for fully convolutional backbones:
    ``1 - (res_out / res_in)^2``.  Architecture-specific effects (attention,
    fixed-size heads) are not modeled.
    """
    if res_out < 1 or res_in < 1:
        raise ValueError(f"Resolutions must be positive, got {res_out} and {res_in}")
    return 1 - (res_out / res_in) ** 2


def estimate_gflops(base_gflops: float, res_out: int, res_in: int) -> float:
    """Scale a backbone's GFLOPs at *res_in* to *res_out* under the quadratic model."""
    return base_gflops * (1 - flops_ratio(res_out, res_in))
