"""Box overlays for visual debugging of crop decisions."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from mocrop.errors import ValidationError
from mocrop.modeling.geometry import center_crop_box
from mocrop.models import CropDecision, Frame, PixelBox

logger = logging.getLogger(__name__)

Color = tuple[int, int, int]

ADAPTIVE_RGB: Color = (0, 255, 0)
CENTER_RGB: Color = (255, 0, 0)


def render_overlay(frame: Frame, boxes: Sequence[tuple[PixelBox, Color]]) -> Frame:
    """Copy of *frame* with a 1-pixel outline drawn for each ``(box, color)``.

    Later boxes paint over earlier ones where outlines cross.
    """
    pixels = frame.array().copy()
    for box, color in boxes:
        if not box.within(frame.size):
            raise ValidationError(
                f"Overlay box ({box.x1}, {box.y1}, {box.x2}, {box.y2}) exceeds "
                f"{frame.width}x{frame.height} frame"
            )
        right, bottom = box.x2 - 1, box.y2 - 1
        pixels[box.y1, box.x1 : box.x2] = color
        pixels[bottom, box.x1 : box.x2] = color
        pixels[box.y1 : box.y2, box.x1] = color
        pixels[box.y1 : box.y2, right] = color
    return Frame.from_array(pixels)


def decision_overlay(frame: Frame, decision: CropDecision, alpha: float) -> Frame:
    """The center box in red under the chosen box in green."""
    center = center_crop_box(frame.size, alpha)
    logger.debug("Overlaying decision (%s) and center box", decision.mode.value)
    return render_overlay(frame, [(center, CENTER_RGB), (decision.pixel, ADAPTIVE_RGB)])
