"""Tests for synthetic clip generation and eval manifests."""

import io
import math
from pathlib import Path

import pytest

from mocrop.errors import ConfigError, SidecarFormatError, ValidationError
from mocrop.input.sidecar import parse_binary, write_binary
from mocrop.models import PixelBox, magnitude
from mocrop.pipeline.synthetic import (
    ACTOR_RGB,
    BACKGROUND_RGB,
    NOISE_MAX_MAGNITUDE,
    SynthSpec,
    dump_manifest,
    gen_synthetic,
    load_manifest,
    random_actor_specs,
)


def _make_spec(**overrides: object) -> SynthSpec:
    values: dict[str, object] = {
        "frame_size": (224, 224),
        "num_frames": 4,
        "actor_box": PixelBox(120, 20, 200, 100),
        "actor_mv_count": 30,
        "noise_mv_count": 10,
        "seed": 5,
    }
    values.update(overrides)
    return SynthSpec(**values)  # type: ignore[arg-type]


class TestSynthSpec:
    def test_actor_outside_frame(self) -> None:
        with pytest.raises(ValidationError, match="outside"):
            _make_spec(actor_box=PixelBox(200, 0, 230, 10))

    def test_needs_a_frame(self) -> None:
        with pytest.raises(ValidationError, match="num_frames"):
            _make_spec(num_frames=0)

    def test_negative_counts(self) -> None:
        with pytest.raises(ValidationError, match="non-negative"):
            _make_spec(noise_mv_count=-1)


class TestGenSynthetic:
    def test_seed_deterministic(self) -> None:
        assert gen_synthetic(_make_spec()) == gen_synthetic(_make_spec())
        assert gen_synthetic(_make_spec()).field != gen_synthetic(_make_spec(seed=6)).field

    def test_vector_count_and_frames(self) -> None:
        clip = gen_synthetic(_make_spec())
        assert len(clip.field) == 4 * (30 + 10)
        assert {v.frame_index for v in clip.field.vectors} == {0, 1, 2, 3}
        assert len(clip.frames) == 4

    def test_actor_only_origins_inside_truth(self) -> None:
        spec = _make_spec(noise_mv_count=0, actor_mv_count=500)
        clip = gen_synthetic(spec)
        box = clip.truth
        assert box == spec.actor_box
        for v in clip.field.vectors:
            assert box.x1 <= v.x < box.x2
            assert box.y1 <= v.y < box.y2
            assert 3.0 - 1e-4 <= magnitude(v) <= 8.0 + 1e-4

    def test_noise_is_near_static(self) -> None:
        clip = gen_synthetic(_make_spec(actor_mv_count=0, noise_mv_count=500))
        assert all(magnitude(v) <= NOISE_MAX_MAGNITUDE + 1e-6 for v in clip.field.vectors)

    def test_pan_shifts_every_vector(self) -> None:
        clip = gen_synthetic(
            _make_spec(actor_mv_count=0, noise_mv_count=200, camera_pan=(5.0, 0.0))
        )
        for v in clip.field.vectors:
            assert math.hypot(v.dx - 5.0, v.dy) <= NOISE_MAX_MAGNITUDE + 1e-5

    def test_frames_paint_the_actor(self) -> None:
        spec = _make_spec()
        pixels = gen_synthetic(spec).frames[0].array()
        assert tuple(pixels[50, 150]) == ACTOR_RGB
        assert tuple(pixels[150, 50]) == BACKGROUND_RGB
        assert pixels.shape == (224, 224, 3)

    def test_default_clip_id(self) -> None:
        assert gen_synthetic(_make_spec(seed=9)).field.clip_id == "synth-9"
        assert gen_synthetic(_make_spec(), clip_id="c").field.clip_id == "c"

    def test_survives_binary_round_trip(self) -> None:
        field = gen_synthetic(_make_spec(), clip_id="rt").field
        assert parse_binary(io.BytesIO(write_binary(field)), clip_id="rt") == field


class TestRandomActorSpecs:
    def test_seeded(self) -> None:
        assert random_actor_specs(20, seed=1) == random_actor_specs(20, seed=1)
        assert random_actor_specs(20, seed=1) != random_actor_specs(20, seed=2)

    def test_boxes_fit_and_match_fraction(self) -> None:
        for spec in random_actor_specs(100, seed=3):
            box = spec.actor_box
            assert box.within((224, 224))
            assert 0.6 * 224 - 1 <= box.width <= 0.7 * 224 + 1
            assert 0.6 * 224 - 1 <= box.height <= 0.7 * 224 + 1

    def test_outer_placement(self) -> None:
        for spec in random_actor_specs(100, seed=4, placement="outer"):
            box = spec.actor_box
            for lo, hi in ((box.x1, box.x2), (box.y1, box.y2)):
                offset = abs((lo + hi) / 2 - 112)
                reach = (224 - (hi - lo)) / 2
                assert offset >= 0.5 * reach - 1

    def test_center_placement(self) -> None:
        for spec in random_actor_specs(50, seed=5, placement="center"):
            box = spec.actor_box
            assert abs((box.x1 + box.x2) / 2 - 112) <= 1
            assert abs((box.y1 + box.y2) / 2 - 112) <= 1

    def test_unknown_placement(self) -> None:
        with pytest.raises(ConfigError, match="placement"):
            random_actor_specs(1, seed=0, placement="corner")


class TestManifest:
    def test_round_trip(self, tmp_path: Path) -> None:
        specs = random_actor_specs(5, seed=6, camera_pan=(2.5, -1.0))
        path = tmp_path / "specs.jsonl"
        path.write_text(dump_manifest(specs))
        assert load_manifest(path) == specs

    def test_blank_lines_skipped_and_defaults(self, tmp_path: Path) -> None:
        path = tmp_path / "specs.jsonl"
        path.write_text(
            '\n{"width":64,"height":64,"frames":2,"actor":[0,0,32,32],'
            '"actor_mvs":5,"noise_mvs":1}\n\n'
        )
        (spec,) = load_manifest(path)
        assert spec.camera_pan == (0.0, 0.0)
        assert spec.seed == 0

    def test_invalid_json_reports_line(self, tmp_path: Path) -> None:
        path = tmp_path / "specs.jsonl"
        path.write_text(dump_manifest(random_actor_specs(1, seed=0)) + "{oops\n")
        with pytest.raises(SidecarFormatError, match="line 2") as info:
            load_manifest(path)
        assert info.value.line == 2

    def test_missing_key(self, tmp_path: Path) -> None:
        path = tmp_path / "specs.jsonl"
        path.write_text('{"width":64,"height":64,"frames":2,"actor":[0,0,32,32]}\n')
        with pytest.raises(SidecarFormatError, match="actor_mvs"):
            load_manifest(path)

    def test_actor_outside_frame(self, tmp_path: Path) -> None:
        path = tmp_path / "specs.jsonl"
        path.write_text(
            '{"width":64,"height":64,"frames":2,"actor":[0,0,80,32],'
            '"actor_mvs":5,"noise_mvs":1}\n'
        )
        with pytest.raises(ValidationError, match="outside"):
            load_manifest(path)

    def test_blank_manifest_has_no_specs(self, tmp_path: Path) -> None:
        path = tmp_path / "specs.jsonl"
        path.write_text("\n\n")
        with pytest.raises(SidecarFormatError, match="no specs"):
            load_manifest(path)
