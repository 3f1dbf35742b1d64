"""Command-line interface: ``mocrop {box|crop|map|synth|eval|bench} [flags]``.

Output formats
--------------
Decision (``box``, and ``decision.txt`` next to ``crop`` output)::

    mode <adaptive|center_fallback>
    norm <c_x> <c_y> <w_b> <h_b>
    pixel <x1> <y1> <x2> <y2>
    score <n>

Eval report (``eval``), one line per clip then one per policy::

    clip <k> seed=<s> mocrop=<iou> center=<iou> random=<iou> full_frame=<iou> mode=<mode>
    mean <policy> <iou>

``eval --summary PATH`` also writes a JSON object with keys ``clips``,
``means``, ``config`` (plus ``ablation`` with ``--ablation``).

Exit codes: 0 success, 1 internal error, 2 input/IO error, 3 validation or
configuration error.  Diagnostics go to stderr prefixed ``mocrop: error:``.

Configuration precedence: defaults < ``MOCROP_SEED`` < ``--config`` file <
flags.
"""

from __future__ import annotations

import argparse
import errno
import logging
import os
import sys
from collections import Counter
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

from mocrop import __version__
from mocrop.config import (
    BACKENDS,
    MoCropConfig,
    config_from_mapping,
    load_config_file,
    seed_from_env,
)
from mocrop.errors import (
    ConfigError,
    FrameFormatError,
    MoCropError,
    SidecarFormatError,
    ValidationError,
)
from mocrop.input.netpbm import read_ppm, write_ppm
from mocrop.input.sidecar import CODECS, read_sidecar, write_sidecar
from mocrop.models import Frame, GridSpec, PixelBox
from mocrop.output.overlay import decision_overlay
from mocrop.output.reports import (
    eval_summary,
    format_bench_table,
    format_decision,
    format_eval_report,
)
from mocrop.pipeline.bench import DEFAULT_RUNS, BackendDisagreementError, run_bench
from mocrop.pipeline.evaluation import ablation, evaluate
from mocrop.pipeline.runner import apply_decision, denoise_and_sample, run_mocrop
from mocrop.pipeline.synthetic import (
    SynthSpec,
    gen_synthetic,
    load_manifest,
    random_actor_specs,
)
from mocrop.processing.density import build_md_map, render_pgm

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT = 2
EXIT_VALIDATION = 3

DECISION_FILE = "decision.txt"


# ---------------------------------------------------------------------------
# Configuration from flags
# ---------------------------------------------------------------------------


def _int(text: str) -> int:
    return int(text, 0)


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'A,B', got {text!r}") from exc
    return a, b


def _box(text: str) -> PixelBox:
    try:
        x1, y1, x2, y2 = (int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'x1,y1,x2,y2', got {text!r}") from exc
    return PixelBox(x1, y1, x2, y2)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    """Flags mirroring ``MoCropConfig`` one to one; unset flags keep lower layers."""
    group = parser.add_argument_group("pipeline configuration")
    group.add_argument("--config", type=Path, help="key=value configuration file")
    group.add_argument("--grid", help="MD-map grid as HxW (default: 6x8)")
    group.add_argument("--alpha", type=float, help="target crop area ratio (default: 0.75)")
    group.add_argument("--delta", type=float, help="area tolerance (default: 0.1)")
    group.add_argument("--epsilon", type=float, help="fixed static-motion threshold in pixels")
    group.add_argument(
        "--epsilon-percentile",
        type=float,
        help="threshold as a percentile of magnitudes (default: 25)",
    )
    group.add_argument(
        "--samples", dest="sample_budget", type=_int, help="sample budget N (default: 4096)"
    )
    group.add_argument("--seed", type=_int, help="sampling seed (default: $MOCROP_SEED or 0)")
    group.add_argument("--dm", dest="enable_dm", action=argparse.BooleanOptionalAction)
    group.add_argument("--mcs", dest="enable_mcs", action=argparse.BooleanOptionalAction)
    group.add_argument("--gmc", dest="enable_gmc", action=argparse.BooleanOptionalAction)
    group.add_argument("--flat-fallback", action=argparse.BooleanOptionalAction)
    group.add_argument("--flatness-threshold", type=float)
    group.add_argument("--backend", choices=BACKENDS, help="search backend (default: integral)")
    group.add_argument("--max-grid-cells", type=_int)


_CONFIG_FLAGS = (
    "grid", "alpha", "delta", "epsilon", "epsilon_percentile", "sample_budget", "seed",
    "enable_dm", "enable_mcs", "enable_gmc", "flat_fallback", "flatness_threshold",
    "backend", "max_grid_cells",
)


def build_config(args: argparse.Namespace) -> MoCropConfig:
    """Layer the config file and explicit flags over the defaults."""
    values: dict[str, Any] = {}
    if args.config is not None:
        values.update(load_config_file(args.config))
    flags = {key: getattr(args, key) for key in _CONFIG_FLAGS if getattr(args, key) is not None}
    # A threshold mode picked on the command line replaces the file's mode.
    if "epsilon" in flags:
        values.pop("epsilon_percentile", None)
    if "epsilon_percentile" in flags:
        values.pop("epsilon", None)
    values.update(flags)
    return config_from_mapping(values)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _emit(payload: str | bytes, out: Path | None) -> None:
    if out is None:
        if isinstance(payload, bytes):
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(payload)
        return
    if isinstance(payload, bytes):
        out.write_bytes(payload)
    else:
        out.write_text(payload, encoding="utf-8", newline="\n")


def _read_frames(frames_dir: Path) -> list[tuple[Path, Frame]]:
    if not frames_dir.is_dir():
        raise FileNotFoundError(errno.ENOENT, os.strerror(errno.ENOENT), str(frames_dir))
    paths = sorted(frames_dir.glob("*.ppm"))
    if not paths:
        raise FrameFormatError(f"no .ppm frames in {frames_dir}")
    frames = []
    for path in paths:
        with path.open("rb") as fh:
            try:
                frames.append((path, read_ppm(fh)))
            except FrameFormatError as exc:
                raise FrameFormatError(f"{path.name}: {exc}") from exc
    return frames


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _box_one(path: Path, cfg: MoCropConfig) -> str:
    return format_decision(run_mocrop(read_sidecar(path), cfg))


def cmd_box(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    sidecars: list[Path] = args.sidecars
    if len(sidecars) == 1:
        _emit(_box_one(sidecars[0], cfg), args.out)
        return EXIT_OK

    if args.out is None:
        raise ConfigError("--out DIR is required when several sidecars are given")
    stems = Counter(path.stem for path in sidecars)
    clashes = sorted(stem for stem, n in stems.items() if n > 1)
    if clashes:
        raise ConfigError(f"sidecars share output names: {', '.join(clashes)}")
    args.out.mkdir(parents=True, exist_ok=True)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            texts = list(pool.map(_box_one, sidecars, [cfg] * len(sidecars)))
    else:
        texts = [_box_one(path, cfg) for path in sidecars]
    for path, text in zip(sidecars, texts, strict=True):
        _emit(text, args.out / f"{path.stem}.txt")
    logger.info("Wrote %d decisions to %s", len(texts), args.out)
    return EXIT_OK


def cmd_crop(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    field = read_sidecar(args.sidecar)
    frames = _read_frames(args.frames)
    for path, frame in frames:
        if frame.size != field.frame_size:
            raise ValidationError(
                f"frame {path.name} is {frame.width}x{frame.height}, "
                f"sidecar frame size is {field.width}x{field.height}"
            )

    decision = run_mocrop(field, cfg)
    cropped = apply_decision(decision, [frame for _, frame in frames])
    args.out.mkdir(parents=True, exist_ok=True)
    for (path, _), frame in zip(frames, cropped, strict=True):
        (args.out / path.name).write_bytes(write_ppm(frame))
    _emit(format_decision(decision), args.out / DECISION_FILE)
    if args.overlay is not None:
        args.overlay.write_bytes(write_ppm(decision_overlay(frames[0][1], decision, cfg.alpha)))
    return EXIT_OK


def cmd_map(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    field = read_sidecar(args.sidecar)
    md_map = build_md_map(denoise_and_sample(field, cfg), cfg.grid)
    _emit(render_pgm(md_map), args.out)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else seed_from_env()
    frame_size = (args.width, args.height)
    actor = args.actor
    if actor is None:
        actor = random_actor_specs(1, seed, frame_size=frame_size)[0].actor_box
    spec = SynthSpec(
        frame_size=frame_size,
        num_frames=args.frames,
        actor_box=actor,
        actor_mv_count=args.actor_mvs,
        noise_mv_count=args.noise_mvs,
        camera_pan=args.pan,
        seed=seed,
    )
    clip = gen_synthetic(spec, clip_id="clip")

    out: Path = args.out
    frames_dir = out / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    suffix = ".jsonl" if args.format == "jsonl" else ".mvs"
    write_sidecar(out / f"clip{suffix}", clip.field, args.format)
    for k, frame in enumerate(clip.frames):
        (frames_dir / f"frame_{k:04d}.ppm").write_bytes(write_ppm(frame))
    truth = clip.truth
    _emit(f"{truth.x1} {truth.y1} {truth.x2} {truth.y2}\n", out / "truth.txt")
    logger.info("Wrote synthetic clip (seed=%d) to %s", seed, out)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.manifest is not None:
        specs = load_manifest(args.manifest)
    else:
        specs = random_actor_specs(args.count, cfg.seed, placement=args.placement)
    report = evaluate(specs, cfg)
    _emit(format_eval_report(report), args.out)
    if args.summary is not None:
        extra = ablation(specs, cfg) if args.ablation else None
        _emit(eval_summary(report, extra), args.summary)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    grids = tuple(GridSpec.parse(text) for text in args.grids.split(","))
    rows = run_bench(grids, alpha=args.alpha, delta=args.delta, runs=args.runs, seed=args.seed)
    _emit(format_bench_table(rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mocrop",
        description="Motion-vector driven clip-level adaptive cropping",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    box = sub.add_parser("box", help="compute the crop decision for one or more clips")
    box.add_argument("sidecars", nargs="+", type=Path, help="motion-vector sidecar files")
    box.add_argument("-o", "--out", type=Path, help="output file (or directory for several)")
    box.add_argument("-j", "--jobs", type=int, default=1, help="parallel clips (default: 1)")
    _add_config_flags(box)
    box.set_defaults(handler=cmd_box)

    crop = sub.add_parser("crop", help="crop a clip's PPM frames with its decision")
    crop.add_argument("sidecar", type=Path)
    crop.add_argument("frames", type=Path, help="directory of .ppm frames")
    crop.add_argument("-o", "--out", type=Path, required=True, help="output directory")
    crop.add_argument("--overlay", type=Path, help="write the first frame with both boxes")
    _add_config_flags(crop)
    crop.set_defaults(handler=cmd_crop)

    md = sub.add_parser("map", help="render the MD map as a PGM")
    md.add_argument("sidecar", type=Path)
    md.add_argument("-o", "--out", type=Path, help="output PGM (default: stdout)")
    _add_config_flags(md)
    md.set_defaults(handler=cmd_map)

    synth = sub.add_parser("synth", help="generate a synthetic clip with a known actor box")
    synth.add_argument("-o", "--out", type=Path, required=True, help="output directory")
    synth.add_argument("--width", type=int, default=224)
    synth.add_argument("--height", type=int, default=224)
    synth.add_argument("--frames", type=int, default=4)
    synth.add_argument("--actor", type=_box, help="x1,y1,x2,y2 (default: random, outer half)")
    synth.add_argument("--actor-mvs", type=int, default=60, help="actor vectors per frame")
    synth.add_argument("--noise-mvs", type=int, default=20, help="noise vectors per frame")
    synth.add_argument("--pan", type=_pair, default=(0.0, 0.0), help="camera pan dx,dy")
    synth.add_argument("--seed", type=_int)
    synth.add_argument("--format", choices=sorted(CODECS), default="mvs1")
    synth.set_defaults(handler=cmd_synth)

    ev = sub.add_parser("eval", help="compare crop policies on synthetic clips")
    ev.add_argument("--manifest", type=Path, help="JSONL file of synthetic specs")
    ev.add_argument("--count", type=int, default=200, help="random clips without a manifest")
    ev.add_argument("--placement", choices=("outer", "center"), default="outer")
    ev.add_argument("-o", "--out", type=Path, help="report file (default: stdout)")
    ev.add_argument("--summary", type=Path, help="write the JSON summary here")
    ev.add_argument("--ablation", action="store_true", help="add component ablation to summary")
    _add_config_flags(ev)
    ev.set_defaults(handler=cmd_eval)

    bench = sub.add_parser("bench", help="time the three search backends")
    bench.add_argument("--grids", default="6x8,12x16,24x32")
    bench.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    bench.add_argument("--alpha", type=float, default=0.75)
    bench.add_argument("--delta", type=float, default=0.1)
    bench.add_argument("--seed", type=_int, default=0)
    bench.add_argument("-o", "--out", type=Path)
    bench.set_defaults(handler=cmd_bench)

    return parser


def _fail(code: int, message: str) -> int:
    print(f"mocrop: error: {message}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    """CLI entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except OSError as exc:
        if exc.filename is not None:
            return _fail(EXIT_INPUT, f"cannot open {exc.filename}: {exc.strerror}")
        return _fail(EXIT_INPUT, str(exc))
    except (SidecarFormatError, FrameFormatError) as exc:
        return _fail(EXIT_INPUT, str(exc))
    except MoCropError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    except BackendDisagreementError as exc:
        return _fail(EXIT_INTERNAL, str(exc))
    except Exception as exc:
        logger.exception("Unexpected failure")
        return _fail(EXIT_INTERNAL, f"internal error: {exc}")
