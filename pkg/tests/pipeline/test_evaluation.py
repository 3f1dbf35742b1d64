"""Tests for crop-policy scoring on synthetic clips."""

from dataclasses import replace

import pytest

from mocrop.config import MoCropConfig
from mocrop.errors import ConfigError
from mocrop.models import CropMode, PixelBox
from mocrop.pipeline.evaluation import (
    ABLATION_VARIANTS,
    POLICIES,
    ablation,
    ablation_configs,
    config_echo,
    evaluate,
    iou,
)
from mocrop.pipeline.synthetic import random_actor_specs


class TestIou:
    def test_identical(self) -> None:
        box = PixelBox(10, 10, 50, 60)
        assert iou(box, box) == 1.0

    def test_disjoint(self) -> None:
        assert iou(PixelBox(0, 0, 10, 10), PixelBox(10, 0, 20, 10)) == 0.0

    def test_half_overlap(self) -> None:
        # intersection 50, union 150
        assert iou(PixelBox(0, 0, 10, 10), PixelBox(5, 0, 15, 10)) == pytest.approx(1 / 3)

    def test_nested(self) -> None:
        assert iou(PixelBox(0, 0, 10, 10), PixelBox(0, 0, 5, 5)) == pytest.approx(0.25)

    def test_symmetric(self) -> None:
        a, b = PixelBox(3, 1, 17, 9), PixelBox(8, 4, 30, 12)
        assert iou(a, b) == iou(b, a)


class TestEvaluate:
    def test_report_shape(self) -> None:
        specs = random_actor_specs(5, seed=0)
        report = evaluate(specs, MoCropConfig(alpha=0.5))
        assert [c.index for c in report.clips] == [0, 1, 2, 3, 4]
        assert [c.seed for c in report.clips] == [s.seed for s in specs]
        assert set(report.means) == set(POLICIES)
        for clip in report.clips:
            assert all(0.0 <= clip.ious[p] <= 1.0 for p in POLICIES)
        assert report.config["alpha"] == 0.5
        assert report.config["grid"] == "6x8"

    def test_deterministic(self) -> None:
        specs = random_actor_specs(10, seed=1)
        assert evaluate(specs, MoCropConfig()) == evaluate(specs, MoCropConfig())

    def test_order_independent_per_clip(self) -> None:
        specs = random_actor_specs(6, seed=2)
        forward = evaluate(specs, MoCropConfig()).clips
        backward = evaluate(specs[::-1], MoCropConfig()).clips[::-1]
        assert [c.ious for c in forward] == [c.ious for c in backward]

    def test_empty_specs(self) -> None:
        with pytest.raises(ConfigError, match="at least one"):
            evaluate([], MoCropConfig())

    def test_no_motion_matches_center(self) -> None:
        specs = random_actor_specs(10, seed=3, actor_mv_count=0, noise_mv_count=0)
        report = evaluate(specs, MoCropConfig(alpha=0.5))
        assert all(c.mode is CropMode.CENTER_FALLBACK for c in report.clips)
        assert report.means["mocrop"] == report.means["center"]

    def test_centered_actors_match_center_policy(self) -> None:
        specs = random_actor_specs(50, seed=4, placement="center")
        means = evaluate(specs, MoCropConfig(alpha=0.5)).means
        assert abs(means["mocrop"] - means["center"]) < 0.1

    @pytest.mark.slow
    def test_outer_actors_beat_center_crop(self) -> None:
        specs = random_actor_specs(200, seed=2024, placement="outer")
        means = evaluate(specs, MoCropConfig(alpha=0.5)).means
        assert means["mocrop"] >= 0.55
        assert means["mocrop"] - means["center"] >= 0.15


class TestAblation:
    def test_variant_names(self) -> None:
        results = ablation(random_actor_specs(3, seed=0), MoCropConfig())
        assert tuple(results) == ABLATION_VARIANTS

    def test_configs_are_cumulative(self) -> None:
        configs = ablation_configs(MoCropConfig(enable_gmc=True))
        assert (configs["ac"].enable_dm, configs["ac"].enable_mcs) == (False, False)
        assert (configs["ac_dm"].enable_dm, configs["ac_dm"].enable_mcs) == (True, False)
        assert (configs["full"].enable_dm, configs["full"].enable_mcs) == (True, True)
        assert all(c.enable_gmc for c in configs.values())

    def test_baseline_is_full_frame(self) -> None:
        specs = random_actor_specs(8, seed=5)
        results = ablation(specs, MoCropConfig())
        full_frame = evaluate(specs, MoCropConfig()).means["full_frame"]
        assert results["baseline"] == pytest.approx(full_frame)

    def test_empty_specs(self) -> None:
        with pytest.raises(ConfigError, match="at least one"):
            ablation([], MoCropConfig())

    @pytest.mark.slow
    def test_dm_helps_under_heavy_static_noise(self) -> None:
        specs = random_actor_specs(100, seed=7, actor_mv_count=15, noise_mv_count=150)
        cfg = MoCropConfig(alpha=0.5, epsilon=1.0, epsilon_percentile=None)
        with_dm = evaluate(specs, cfg).means["mocrop"]
        without_dm = evaluate(specs, replace(cfg, enable_dm=False)).means["mocrop"]
        assert with_dm > without_dm

    @pytest.mark.slow
    def test_gmc_helps_on_panning_clips(self) -> None:
        specs = random_actor_specs(
            100, seed=8, actor_mv_count=15, noise_mv_count=150, camera_pan=(5.0, 0.0)
        )
        cfg = MoCropConfig(alpha=0.5, epsilon=1.0, epsilon_percentile=None)
        with_gmc = evaluate(specs, replace(cfg, enable_gmc=True)).means["mocrop"]
        without_gmc = evaluate(specs, cfg).means["mocrop"]
        assert with_gmc > without_gmc


class TestConfigEcho:
    def test_json_friendly(self) -> None:
        echo = config_echo(MoCropConfig())
        assert echo["grid"] == "6x8"
        assert echo["backend"] == "integral"
        assert echo["epsilon"] is None
