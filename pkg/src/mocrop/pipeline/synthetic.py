"""Synthetic clips with a known actor box, for desk-scale evaluation.

Each clip has an "actor" rectangle emitting strong motion vectors, uniform
background noise with near-zero displacement, and an optional camera pan
added to every vector.  Frames are schematic: a flat background with the
actor rectangle painted in a distinct colour.

Coordinates are quantized to float32 so generated clips survive an MVS1
round trip unchanged.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from mocrop.errors import ConfigError, SidecarFormatError, ValidationError
from mocrop.models import ClipMotionField, Frame, MotionVector, PixelBox
from mocrop.processing.density import make_rng

logger = logging.getLogger(__name__)

# Displacement magnitudes in pixels
ACTOR_MAGNITUDE = (3.0, 8.0)
NOISE_MAX_MAGNITUDE = 0.45

BACKGROUND_RGB = (48, 48, 56)
ACTOR_RGB = (210, 64, 48)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic clip."""

    frame_size: tuple[int, int]
    num_frames: int
    actor_box: PixelBox  # ground truth
    actor_mv_count: int  # per frame
    noise_mv_count: int  # per frame
    camera_pan: tuple[float, float] = (0.0, 0.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_frames < 1:
            raise ValidationError(f"num_frames must be positive, got {self.num_frames}")
        if self.actor_mv_count < 0 or self.noise_mv_count < 0:
            raise ValidationError("Motion-vector counts must be non-negative")
        if not self.actor_box.within(self.frame_size):
            raise ValidationError(
                f"Actor box {self.actor_box} lies outside the {self.frame_size} frame"
            )


@dataclass(frozen=True)
class SynthClip:
    field: ClipMotionField
    frames: list[Frame]
    truth: PixelBox


def _upper_f32(limit: float) -> np.float32:
    """Largest float32 strictly below *limit*."""
    return np.nextafter(np.float32(limit), np.float32(0))


def _points(
    rng: np.random.Generator,
    count: int,
    box: tuple[float, float, float, float],
    magnitude: tuple[float, float],
    pan: tuple[float, float],
) -> np.ndarray:
    """``(count, 4)`` float32 rows of ``x, y, dx, dy``."""
    x1, y1, x2, y2 = box
    xs = rng.uniform(x1, x2, count).astype(np.float32)
    ys = rng.uniform(y1, y2, count).astype(np.float32)
    # uniform() may round onto the open upper bound; keep origins half-open
    xs = np.minimum(xs, _upper_f32(x2))
    ys = np.minimum(ys, _upper_f32(y2))
    radius = rng.uniform(magnitude[0], magnitude[1], count)
    angle = rng.uniform(0.0, 2 * math.pi, count)
    dxs = (radius * np.cos(angle) + pan[0]).astype(np.float32)
    dys = (radius * np.sin(angle) + pan[1]).astype(np.float32)
    return np.stack([xs, ys, dxs, dys], axis=1)


def _render_frame(spec: SynthSpec) -> Frame:
    width, height = spec.frame_size
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:, :] = BACKGROUND_RGB
    box = spec.actor_box
    pixels[box.y1 : box.y2, box.x1 : box.x2] = ACTOR_RGB
    return Frame.from_array(pixels)


def gen_synthetic(spec: SynthSpec, clip_id: str = "") -> SynthClip:
    """Generate motion vectors and frames for *spec*; fully seed-deterministic."""
    rng = make_rng(spec.seed)
    width, height = spec.frame_size
    actor = spec.actor_box
    actor_area = (float(actor.x1), float(actor.y1), float(actor.x2), float(actor.y2))
    frame_area = (0.0, 0.0, float(width), float(height))
    noise_magnitude = (0.0, NOISE_MAX_MAGNITUDE)

    vectors: list[MotionVector] = []
    for frame_index in range(spec.num_frames):
        rows = np.concatenate(
            [
                _points(rng, spec.actor_mv_count, actor_area, ACTOR_MAGNITUDE, spec.camera_pan),
                _points(rng, spec.noise_mv_count, frame_area, noise_magnitude, spec.camera_pan),
            ]
        )
        vectors.extend(
            MotionVector(frame_index, x, y, dx, dy) for x, y, dx, dy in rows.tolist()
        )

    field = ClipMotionField(spec.frame_size, tuple(vectors), clip_id or f"synth-{spec.seed}")
    frame = _render_frame(spec)
    logger.debug("Generated synthetic clip %r with %d vectors", field.clip_id, len(field))
    return SynthClip(field=field, frames=[frame] * spec.num_frames, truth=actor)


# ---------------------------------------------------------------------------
# Spec batches for experiments
# ---------------------------------------------------------------------------


def random_actor_specs(
    count: int,
    seed: int,
    *,
    placement: str = "outer",
    frame_size: tuple[int, int] = (224, 224),
    num_frames: int = 4,
    actor_fraction: tuple[float, float] = (0.6, 0.7),
    actor_mv_count: int = 60,
    noise_mv_count: int = 20,
    camera_pan: tuple[float, float] = (0.0, 0.0),
) -> list[SynthSpec]:
    """A seeded batch of specs with randomly sized and placed actors.

    Actor sides are ``actor_fraction`` of the frame sides.  ``placement``
    chooses where the actor center goes along each axis, as a fraction of
    the largest in-frame offset from the frame center:

    - ``"outer"``: a random fraction in [0.5, 1] with a random sign, i.e.
      the outer half of the feasible offsets;
    - ``"center"``: offset 0.
    """
    if placement not in ("outer", "center"):
        raise ConfigError(f"placement must be 'outer' or 'center', got {placement!r}")
    rng = make_rng(seed)
    width, height = frame_size
    specs: list[SynthSpec] = []
    for _ in range(count):
        side_w = int(round(width * rng.uniform(*actor_fraction)))
        side_h = int(round(height * rng.uniform(*actor_fraction)))
        offsets = []
        for frame_side, side in ((width, side_w), (height, side_h)):
            reach = (frame_side - side) / 2
            if placement == "outer":
                offsets.append(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.0) * reach)
            else:
                offsets.append(0.0)
        x1 = min(max(int(round(width / 2 + offsets[0] - side_w / 2)), 0), width - side_w)
        y1 = min(max(int(round(height / 2 + offsets[1] - side_h / 2)), 0), height - side_h)
        specs.append(
            SynthSpec(
                frame_size=frame_size,
                num_frames=num_frames,
                actor_box=PixelBox(x1, y1, x1 + side_w, y1 + side_h),
                actor_mv_count=actor_mv_count,
                noise_mv_count=noise_mv_count,
                camera_pan=camera_pan,
                seed=int(rng.integers(0, 2**63)),
            )
        )
    return specs


# ---------------------------------------------------------------------------
# Eval manifests (JSONL, one spec per line)
# ---------------------------------------------------------------------------


def spec_to_record(spec: SynthSpec) -> dict[str, object]:
    box = spec.actor_box
    return {
        "width": spec.frame_size[0],
        "height": spec.frame_size[1],
        "frames": spec.num_frames,
        "actor": [box.x1, box.y1, box.x2, box.y2],
        "actor_mvs": spec.actor_mv_count,
        "noise_mvs": spec.noise_mv_count,
        "pan": list(spec.camera_pan),
        "seed": spec.seed,
    }


def spec_from_record(record: dict[str, Any]) -> SynthSpec:
    """Inverse of ``spec_to_record``; ``pan`` and ``seed`` are optional."""
    try:
        x1, y1, x2, y2 = (int(v) for v in record["actor"])
        pan_x, pan_y = (float(v) for v in record.get("pan", (0.0, 0.0)))
        return SynthSpec(
            frame_size=(int(record["width"]), int(record["height"])),
            num_frames=int(record["frames"]),
            actor_box=PixelBox(x1, y1, x2, y2),
            actor_mv_count=int(record["actor_mvs"]),
            noise_mv_count=int(record["noise_mvs"]),
            camera_pan=(pan_x, pan_y),
            seed=int(record.get("seed", 0)),
        )
    except KeyError as exc:
        raise SidecarFormatError(f"missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise SidecarFormatError(f"bad spec record: {exc}") from exc


def load_manifest(path: str | Path) -> list[SynthSpec]:
    """Read an eval manifest; blank lines are skipped."""
    specs: list[SynthSpec] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SidecarFormatError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        if not isinstance(record, dict):
            raise SidecarFormatError("expected a JSON object", line=lineno)
        try:
            specs.append(spec_from_record(record))
        except SidecarFormatError as exc:
            raise SidecarFormatError(str(exc), line=lineno) from exc
    if not specs:
        raise SidecarFormatError(f"manifest {path} has no specs")
    logger.info("Loaded %d synthetic specs from %s", len(specs), path)
    return specs


def dump_manifest(specs: list[SynthSpec]) -> str:
    return "".join(
        json.dumps(spec_to_record(spec), separators=(",", ":")) + "\n" for spec in specs
    )
