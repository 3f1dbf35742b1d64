"""Tests for crop-box overlays."""

import numpy as np
import pytest

from mocrop.config import MoCropConfig
from mocrop.errors import ValidationError
from mocrop.modeling.geometry import center_crop_box
from mocrop.models import (
    ClipMotionField,
    Frame,
    GridSpec,
    MotionDensityMap,
    MotionVector,
    PixelBox,
)
from mocrop.output.overlay import ADAPTIVE_RGB, CENTER_RGB, decision_overlay, render_overlay
from mocrop.pipeline.runner import center_fallback, run_mocrop


def _black(width: int, height: int) -> Frame:
    return Frame(width, height, bytes(width * height * 3))


class TestRenderOverlay:
    def test_outline_only(self) -> None:
        out = render_overlay(_black(10, 10), [(PixelBox(2, 3, 7, 8), ADAPTIVE_RGB)]).array()
        assert tuple(out[3, 2]) == ADAPTIVE_RGB
        assert tuple(out[7, 6]) == ADAPTIVE_RGB
        assert tuple(out[5, 4]) == (0, 0, 0)
        assert tuple(out[8, 7]) == (0, 0, 0)
        painted = np.any(out != 0, axis=2)
        assert int(painted.sum()) == 2 * 5 + 2 * 3

    def test_input_untouched(self) -> None:
        frame = _black(4, 4)
        render_overlay(frame, [(PixelBox(0, 0, 4, 4), CENTER_RGB)])
        assert frame.data == bytes(48)

    def test_later_box_wins(self) -> None:
        box = PixelBox(0, 0, 3, 3)
        out = render_overlay(_black(3, 3), [(box, CENTER_RGB), (box, ADAPTIVE_RGB)]).array()
        assert tuple(out[0, 0]) == ADAPTIVE_RGB

    def test_box_outside_frame(self) -> None:
        with pytest.raises(ValidationError, match="exceeds 4x4 frame"):
            render_overlay(_black(4, 4), [(PixelBox(0, 0, 5, 4), CENTER_RGB)])


class TestDecisionOverlay:
    def test_both_boxes_drawn(self) -> None:
        vectors = tuple(MotionVector(0, 100.0, 50.0, 4.0, 0.0) for _ in range(5))
        cfg = MoCropConfig(
            grid=GridSpec(4, 4), alpha=1 / 16, delta=0.0, epsilon=0.0, epsilon_percentile=None
        )
        decision = run_mocrop(ClipMotionField((160, 160), vectors), cfg)
        out = decision_overlay(_black(160, 160), decision, cfg.alpha).array()
        center = center_crop_box((160, 160), cfg.alpha)
        assert tuple(out[decision.pixel.y1, decision.pixel.x1]) == ADAPTIVE_RGB
        assert tuple(out[center.y1, center.x1]) == CENTER_RGB

    def test_fallback_draws_green_over_red(self) -> None:
        md_map = MotionDensityMap(GridSpec(2, 2), np.zeros((2, 2)))
        decision = center_fallback((32, 32), md_map, 0.25)
        out = decision_overlay(_black(32, 32), decision, 0.25).array()
        assert tuple(out[decision.pixel.y1, decision.pixel.x1]) == ADAPTIVE_RGB
