"""Crop-policy comparison on synthetic clips with known actor boxes.

Every policy is scored by IoU against the ground-truth actor box:

- ``mocrop``: the pipeline's decision for the clip;
- ``center``: the centered ``alpha``-area box;
- ``random``: a box of the same size at a random position, seeded from the
  clip seed so reports are reproducible;
- ``full_frame``: the uncropped frame, the no-crop baseline.

Clips are independent, and means are taken over the fixed clip order, so
the report does not depend on evaluation order.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace
from typing import Any

import numpy as np

from mocrop.config import MoCropConfig
from mocrop.errors import ConfigError
from mocrop.modeling.geometry import center_crop_box, random_crop_box
from mocrop.models import CropMode, PixelBox
from mocrop.pipeline.runner import run_mocrop
from mocrop.pipeline.synthetic import SynthClip, SynthSpec, gen_synthetic
from mocrop.processing.density import make_rng

logger = logging.getLogger(__name__)

POLICIES = ("mocrop", "center", "random", "full_frame")

# Component variants, cumulative: full frame, then AC alone, + DM, + MCS.
ABLATION_VARIANTS = ("baseline", "ac", "ac_dm", "full")

_U64 = 2**64


def iou(a: PixelBox, b: PixelBox) -> float:
    """Intersection over union of two pixel boxes, in ``[0, 1]``."""
    inter_w = min(a.x2, b.x2) - max(a.x1, b.x1)
    inter_h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if inter_w <= 0 or inter_h <= 0:
        return 0.0
    inter = inter_w * inter_h
    return inter / (a.area + b.area - inter)


def random_policy_rng(clip_seed: int) -> np.random.Generator:
    """The random-crop policy's generator, derived from (not equal to) the clip seed."""
    return make_rng((clip_seed + 1) % _U64)


@dataclass(frozen=True)
class ClipScore:
    index: int
    seed: int
    ious: dict[str, float]
    mode: CropMode


@dataclass(frozen=True)
class EvalReport:
    """Per-clip IoUs for every policy, their means, and the config used."""

    clips: list[ClipScore]
    means: dict[str, float]
    config: dict[str, Any]


def config_echo(cfg: MoCropConfig) -> dict[str, Any]:
    """JSON-friendly view of a config."""
    echo = asdict(cfg)
    echo["grid"] = str(cfg.grid)
    return echo


def _score_clip(index: int, spec: SynthSpec, clip: SynthClip, cfg: MoCropConfig) -> ClipScore:
    frame_size = spec.frame_size
    decision = run_mocrop(clip.field, cfg)
    width, height = frame_size
    ious = {
        "mocrop": iou(decision.pixel, clip.truth),
        "center": iou(center_crop_box(frame_size, cfg.alpha), clip.truth),
        "random": iou(
            random_crop_box(frame_size, cfg.alpha, random_policy_rng(spec.seed)), clip.truth
        ),
        "full_frame": iou(PixelBox(0, 0, width, height), clip.truth),
    }
    return ClipScore(index=index, seed=spec.seed, ious=ious, mode=decision.mode)


def _means(clips: list[ClipScore], policies: tuple[str, ...]) -> dict[str, float]:
    return {p: sum(c.ious[p] for c in clips) / len(clips) for p in policies}


def evaluate(specs: list[SynthSpec], cfg: MoCropConfig) -> EvalReport:
    """Score every crop policy on each synthetic clip and average."""
    if not specs:
        raise ConfigError("evaluate needs at least one synthetic spec")
    clips = [
        _score_clip(k, spec, gen_synthetic(spec), cfg) for k, spec in enumerate(specs)
    ]
    means = _means(clips, POLICIES)
    logger.info(
        "Evaluated %d clips: %s",
        len(clips), ", ".join(f"{p}={means[p]:.3f}" for p in POLICIES),
    )
    return EvalReport(clips=clips, means=means, config=config_echo(cfg))


def ablation_configs(cfg: MoCropConfig) -> dict[str, MoCropConfig]:
    """The cumulative component variants built from *cfg*."""
    return {
        "ac": replace(cfg, enable_dm=False, enable_mcs=False),
        "ac_dm": replace(cfg, enable_dm=True, enable_mcs=False),
        "full": replace(cfg, enable_dm=True, enable_mcs=True),
    }


def ablation(specs: list[SynthSpec], cfg: MoCropConfig) -> dict[str, float]:
    """Mean MoCrop IoU per component variant, plus the full-frame baseline.

    Clips are generated once and shared across variants.
    """
    if not specs:
        raise ConfigError("ablation needs at least one synthetic spec")
    clips = [gen_synthetic(spec) for spec in specs]
    results = {
        "baseline": sum(
            iou(PixelBox(0, 0, *spec.frame_size), clip.truth)
            for spec, clip in zip(specs, clips, strict=True)
        ) / len(clips)
    }
    for name, variant in ablation_configs(cfg).items():
        results[name] = sum(
            iou(run_mocrop(clip.field, variant).pixel, clip.truth) for clip in clips
        ) / len(clips)
    logger.info(
        "Ablation over %d clips: %s",
        len(clips), ", ".join(f"{k}={v:.3f}" for k, v in results.items()),
    )
    return results
