"""Report generation: line-oriented text for decisions, evaluations and benchmarks.

Structured outputs are plain text so golden tests can diff them byte for
byte.  Reals are printed with a fixed six decimals.
"""

from __future__ import annotations

import json
import logging
from typing import Any

from mocrop.errors import ValidationError
from mocrop.modeling.geometry import flops_ratio
from mocrop.models import CropDecision, NormalizedBox
from mocrop.pipeline.bench import BenchRow
from mocrop.pipeline.evaluation import POLICIES, EvalReport

logger = logging.getLogger(__name__)

# Efficiency echo in eval summaries: the 224 -> 192 input reduction.
REFERENCE_RES_IN = 224
REFERENCE_RES_OUT = 192


def format_normalized_line(box: NormalizedBox) -> str:
    """``c_x c_y w_b h_b``, space-separated, no trailing newline."""
    return f"{box.cx:.6f} {box.cy:.6f} {box.w:.6f} {box.h:.6f}"


def parse_normalized_line(line: str) -> NormalizedBox:
    parts = line.split()
    if len(parts) != 4:
        raise ValidationError(f"Expected 4 numbers in a normalized box line, got {line!r}")
    try:
        cx, cy, w, h = (float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"Non-numeric normalized box line {line!r}") from exc
    return NormalizedBox(cx, cy, w, h)


def format_decision(decision: CropDecision) -> str:
    """The four-line decision record: mode, norm, pixel, score."""
    p = decision.pixel
    return (
        f"mode {decision.mode.value}\n"
        f"norm {format_normalized_line(decision.normalized)}\n"
        f"pixel {p.x1} {p.y1} {p.x2} {p.y2}\n"
        f"score {decision.score}\n"
    )


def format_eval_report(report: EvalReport) -> str:
    """One ``clip`` line per clip, then one ``mean`` line per policy."""
    lines: list[str] = []
    for clip in report.clips:
        scores = " ".join(f"{p}={clip.ious[p]:.6f}" for p in POLICIES)
        lines.append(f"clip {clip.index} seed={clip.seed} {scores} mode={clip.mode.value}")
    for policy in POLICIES:
        lines.append(f"mean {policy} {report.means[policy]:.6f}")
    return "\n".join(lines) + "\n"


def eval_summary(report: EvalReport, ablation: dict[str, float] | None = None) -> str:
    """Machine-readable JSON summary with keys ``clips``, ``means``, ``config``."""
    summary: dict[str, Any] = {
        "clips": len(report.clips),
        "means": {p: round(report.means[p], 6) for p in POLICIES},
        "config": report.config,
        "flops_reduction": {
            "res_in": REFERENCE_RES_IN,
            "res_out": REFERENCE_RES_OUT,
            "ratio": round(flops_ratio(REFERENCE_RES_OUT, REFERENCE_RES_IN), 6),
        },
    }
    if ablation is not None:
        summary["ablation"] = {k: round(v, 6) for k, v in ablation.items()}
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def _format_seconds(seconds: float) -> str:
    if seconds >= 1e-2:
        return f"{seconds * 1e3:.1f} ms"
    if seconds >= 1e-5:
        return f"{seconds * 1e6:.1f} us"
    return f"{seconds * 1e9:.0f} ns"


def format_bench_table(rows: list[BenchRow]) -> str:
    header = f"{'grid':<8} {'shapes':<8} {'backend':<9} {'n':>4} {'median':>10}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.grid!s:<8} {row.shape_set:<8} {row.backend:<9} {row.n_shapes:>4} "
            f"{_format_seconds(row.median_seconds):>10}"
        )
    return "\n".join(lines) + "\n"
