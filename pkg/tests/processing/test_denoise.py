"""Tests for static-motion filtering, frame merging and global-motion compensation."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mocrop.models import ClipMotionField, MotionVector, magnitude
from mocrop.processing.denoise import (
    epsilon_from_percentile,
    filter_static,
    global_motion_compensate,
    merge_frames,
)


def _field(displacements: list[tuple[float, float]], frame: int = 0) -> ClipMotionField:
    vectors = tuple(MotionVector(frame, 1.0, 1.0, dx, dy) for dx, dy in displacements)
    return ClipMotionField((16, 16), vectors)


displacement = st.tuples(
    st.floats(min_value=-50, max_value=50, allow_nan=False),
    st.floats(min_value=-50, max_value=50, allow_nan=False),
)


class TestEpsilonFromPercentile:
    def test_nearest_rank(self) -> None:
        field = _field([(0, 0), (0, 0), (0, 0), (3, 4)])
        assert epsilon_from_percentile(field, 50) == 0.0

    def test_zero_is_minimum(self) -> None:
        field = _field([(1, 0), (2, 0), (3, 0), (4, 0)])
        assert epsilon_from_percentile(field, 0) == 1.0

    def test_matches_sort_and_index(self) -> None:
        rng = np.random.default_rng(11)
        field = _field([tuple(d) for d in rng.normal(0, 5, (1000, 2)).tolist()])
        expected = sorted(magnitude(v) for v in field.vectors)[math.ceil(30 * 1000 / 100) - 1]
        assert epsilon_from_percentile(field, 30) == expected

    def test_empty_field(self) -> None:
        with pytest.raises(ValueError, match="empty"):
            epsilon_from_percentile(_field([]), 25)


class TestFilterStatic:
    def test_strict_inequality_drops_zero_motion(self) -> None:
        assert len(filter_static(_field([(0, 0)] * 5), 0.0)) == 0

    def test_threshold_against_magnitude(self) -> None:
        field = _field([(3, 4)])
        assert len(filter_static(field, 5.0)) == 0
        assert len(filter_static(field, 4.9)) == 1
        assert len(filter_static(_field([(0, 0)]), -0.0)) == 0

    def test_empty_field(self) -> None:
        assert len(filter_static(_field([]), 1.0)) == 0

    def test_negative_epsilon(self) -> None:
        with pytest.raises(ValueError, match="epsilon"):
            filter_static(_field([]), -1.0)

    @given(st.lists(displacement, max_size=30), st.floats(0, 20), st.floats(0, 20))
    def test_monotone_in_epsilon(
        self, displacements: list[tuple[float, float]], a: float, b: float
    ) -> None:
        field = _field(displacements)
        low, high = min(a, b), max(a, b)
        assert set(filter_static(field, high).vectors) <= set(filter_static(field, low).vectors)

    @given(st.lists(displacement, max_size=30), st.floats(0, 20))
    def test_idempotent_and_order_preserving(
        self, displacements: list[tuple[float, float]], eps: float
    ) -> None:
        once = filter_static(_field(displacements), eps)
        assert filter_static(once, eps) == once
        assert all(magnitude(v) > eps for v in once.vectors)


class TestMergeFrames:
    def test_pools_frames_in_order(self) -> None:
        vectors = tuple(
            MotionVector(f, float(k), 1.0, 1.0, 0.0)
            for f, n in enumerate([5, 0, 7])
            for k in range(n)
        )
        field = ClipMotionField((16, 16), vectors)
        merged = merge_frames(field)
        assert len(merged) == 12
        assert merged.vectors == vectors

    def test_single_frame_unchanged(self) -> None:
        field = _field([(1, 0), (0, 1)])
        assert merge_frames(field) == field


class TestGlobalMotionCompensate:
    def test_constant_pan_removed(self) -> None:
        result = global_motion_compensate(_field([(2, 0)] * 4))
        assert all(v.displacement == (0.0, 0.0) for v in result.vectors)

    def test_median_subtracted(self) -> None:
        result = global_motion_compensate(_field([(1, 0), (3, 0), (5, 0)]))
        assert [v.displacement for v in result.vectors] == [(-2.0, 0.0), (0.0, 0.0), (2.0, 0.0)]

    def test_even_count_uses_lower_median(self) -> None:
        result = global_motion_compensate(_field([(1, 0), (3, 0), (5, 0), (7, 0)]))
        assert [v.dx for v in result.vectors] == [-2.0, 0.0, 2.0, 4.0]

    def test_origins_unchanged(self) -> None:
        field = ClipMotionField((16, 16), (MotionVector(3, 5.5, 7.5, 2.0, 1.0),))
        (v,) = global_motion_compensate(field).vectors
        assert (v.frame_index, v.x, v.y) == (3, 5.5, 7.5)

    def test_empty_field(self) -> None:
        field = _field([])
        assert global_motion_compensate(field) == field
