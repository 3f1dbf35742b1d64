"""Motion-vector sidecar formats: JSONL for humans, MVS1 binary for scale.

JSONL layout (UTF-8, LF line endings)::

    {"clip_id": "v_001", "width": 224, "height": 224}
    {"f": 0, "x": 10.0, "y": 20.0, "dx": 1.0, "dy": 0.0}
    ...

MVS1 layout (all little-endian)::

    header  magic "MVS1" | version u32 (=1) | width u32 | height u32 | count u64
    record  frame_index u32 | x f32 | y f32 | dx f32 | dy f32

Coordinates are stored as f32 in the binary format; a field survives a
binary round trip exactly when its values are f32-representable.
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path
from typing import Any, BinaryIO

import numpy as np

from mocrop.errors import SidecarFormatError, ValidationError
from mocrop.input import SidecarCodec
from mocrop.models import ClipMotionField, MotionVector, origin_problem

logger = logging.getLogger(__name__)

MAGIC = b"MVS1"
VERSION = 1
HEADER = struct.Struct("<4sIIIQ")
RECORD_DTYPE = np.dtype(
    [("f", "<u4"), ("x", "<f4"), ("y", "<f4"), ("dx", "<f4"), ("dy", "<f4")]
)

_U32_MAX = 2**32 - 1
_RECORD_KEYS = ("f", "x", "y", "dx", "dy")


# ---------------------------------------------------------------------------
# JSONL
# ---------------------------------------------------------------------------


def _is_number(value: Any) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


def _parse_header(obj: Any, line: int) -> tuple[str, int, int]:
    if not isinstance(obj, dict) or "width" not in obj or "height" not in obj:
        raise SidecarFormatError(
            "missing header object with clip_id, width, height", line=line
        )
    width, height = obj["width"], obj["height"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (width, height)):
        raise SidecarFormatError("header width/height must be integers", line=line)
    if width < 1 or height < 1:
        raise ValidationError(f"line {line}: frame size must be positive, got {width}x{height}")
    return str(obj.get("clip_id", "")), width, height


def _parse_record(obj: Any, line: int) -> MotionVector:
    if not isinstance(obj, dict):
        raise SidecarFormatError("record must be a JSON object", line=line)
    missing = [k for k in _RECORD_KEYS if k not in obj]
    if missing:
        raise SidecarFormatError(f"record missing keys {missing}", line=line)
    frame = obj["f"]
    if not isinstance(frame, int) or isinstance(frame, bool):
        raise SidecarFormatError(f"frame index must be an integer, got {frame!r}", line=line)
    coords = [obj[k] for k in ("x", "y", "dx", "dy")]
    if not all(_is_number(v) for v in coords):
        raise SidecarFormatError(f"non-numeric coordinate in {coords!r}", line=line)
    x, y, dx, dy = (float(v) for v in coords)
    return MotionVector(frame, x, y, dx, dy)


def parse_jsonl(stream: BinaryIO) -> ClipMotionField:
    """Decode a JSONL sidecar; vector order equals line order."""
    header: tuple[str, int, int] | None = None
    vectors: list[MotionVector] = []

    for lineno, raw in enumerate(stream, start=1):
        try:
            text = raw.decode("utf-8").strip()
        except UnicodeDecodeError as exc:
            raise SidecarFormatError("not valid UTF-8", line=lineno) from exc
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SidecarFormatError(f"malformed JSON ({exc.msg})", line=lineno) from exc

        if header is None:
            header = _parse_header(obj, lineno)
            continue

        vector = _parse_record(obj, lineno)
        problem = origin_problem(vector, header[1], header[2])
        if problem is not None:
            raise ValidationError(f"line {lineno}: record {len(vectors)}: {problem}")
        vectors.append(vector)

    if header is None:
        raise SidecarFormatError("missing header: sidecar is empty")

    clip_id, width, height = header
    logger.debug("Parsed %d JSONL records for clip %r", len(vectors), clip_id)
    return ClipMotionField((width, height), tuple(vectors), clip_id)


def write_jsonl(field: ClipMotionField) -> bytes:
    """Encode *field* as JSONL: one header line plus one line per vector."""
    lines = [
        json.dumps(
            {"clip_id": field.clip_id, "width": field.width, "height": field.height},
            separators=(",", ":"),
        )
    ]
    for v in field.vectors:
        lines.append(
            json.dumps(
                {"f": v.frame_index, "x": v.x, "y": v.y, "dx": v.dx, "dy": v.dy},
                separators=(",", ":"),
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# MVS1 binary
# ---------------------------------------------------------------------------


def _read_exact(stream: BinaryIO, size: int) -> bytes:
    data = stream.read(size)
    return data if data is not None else b""


def parse_binary(stream: BinaryIO, *, clip_id: str = "") -> ClipMotionField:
    """Decode an MVS1 sidecar.  The format has no clip id; pass one in."""
    head = _read_exact(stream, HEADER.size)
    if len(head) < len(MAGIC) or head[:4] != MAGIC:
        raise SidecarFormatError(f"bad magic {head[:4]!r}, expected {MAGIC!r}")
    if len(head) < HEADER.size:
        raise SidecarFormatError(
            f"truncated header: {len(head)} of {HEADER.size} bytes"
        )
    _, version, width, height, count = HEADER.unpack(head)
    if version != VERSION:
        raise SidecarFormatError(f"unsupported version {version}, expected {VERSION}")
    if width < 1 or height < 1:
        raise ValidationError(f"frame size must be positive, got {width}x{height}")

    expected = count * RECORD_DTYPE.itemsize
    body = _read_exact(stream, expected)
    if len(body) < expected:
        raise SidecarFormatError(
            f"truncated stream: header declares {count} records "
            f"({expected} bytes), got {len(body)} bytes"
        )
    trailing = _read_exact(stream, 1)
    if trailing:
        raise SidecarFormatError(
            f"record_count mismatch: data continues past the {count} declared records"
        )

    records = np.frombuffer(body, dtype=RECORD_DTYPE)
    vectors: list[MotionVector] = []
    for k, (frame, x, y, dx, dy) in enumerate(records.tolist()):
        vector = MotionVector(frame, x, y, dx, dy)
        problem = origin_problem(vector, width, height)
        if problem is not None:
            raise ValidationError(f"record {k}: {problem}")
        vectors.append(vector)

    logger.debug("Parsed %d MVS1 records for clip %r", len(vectors), clip_id)
    return ClipMotionField((width, height), tuple(vectors), clip_id)


def write_binary(field: ClipMotionField) -> bytes:
    """Encode *field* as MVS1, quantizing coordinates to f32."""
    if field.width > _U32_MAX or field.height > _U32_MAX:
        raise ValidationError(f"frame size {field.width}x{field.height} exceeds u32")
    records = np.zeros(len(field), dtype=RECORD_DTYPE)
    if field.vectors:
        frames = [v.frame_index for v in field.vectors]
        if max(frames) > _U32_MAX:
            raise ValidationError("frame index exceeds u32")
        records["f"] = frames
        records["x"] = [v.x for v in field.vectors]
        records["y"] = [v.y for v in field.vectors]
        records["dx"] = [v.dx for v in field.vectors]
        records["dy"] = [v.dy for v in field.vectors]
    header = HEADER.pack(MAGIC, VERSION, field.width, field.height, len(field))
    return header + records.tobytes()


# ---------------------------------------------------------------------------
# Codec objects and path helpers
# ---------------------------------------------------------------------------


class JsonlCodec(SidecarCodec):
    """Line-oriented JSON sidecar, convenient for debugging and scripts."""

    @property
    def format_name(self) -> str:
        return "jsonl"

    def parse(self, stream: BinaryIO, *, clip_id: str = "") -> ClipMotionField:
        field = parse_jsonl(stream)
        if not field.clip_id and clip_id:
            field = ClipMotionField(field.frame_size, field.vectors, clip_id)
        return field

    def write(self, field: ClipMotionField) -> bytes:
        return write_jsonl(field)


class BinaryCodec(SidecarCodec):
    """Fixed-size MVS1 records for benchmark-scale clips."""

    @property
    def format_name(self) -> str:
        return "mvs1"

    def parse(self, stream: BinaryIO, *, clip_id: str = "") -> ClipMotionField:
        return parse_binary(stream, clip_id=clip_id)

    def write(self, field: ClipMotionField) -> bytes:
        return write_binary(field)


CODECS: dict[str, SidecarCodec] = {"jsonl": JsonlCodec(), "mvs1": BinaryCodec()}


def detect_codec(path: str | Path) -> SidecarCodec:
    """Pick a codec from the file suffix, falling back to sniffing the magic."""
    path = Path(path)
    if path.suffix.lower() in (".jsonl", ".json"):
        return CODECS["jsonl"]
    with path.open("rb") as fh:
        head = fh.read(len(MAGIC))
    return CODECS["mvs1"] if head == MAGIC else CODECS["jsonl"]


def read_sidecar(path: str | Path) -> ClipMotionField:
    """Read a sidecar file in whichever format it is written in."""
    path = Path(path)
    codec = detect_codec(path)
    with path.open("rb") as fh:
        field = codec.parse(fh, clip_id=path.stem)
    logger.info(
        "Read %d motion vectors from %s (%s, %dx%d)",
        len(field), path, codec.format_name, field.width, field.height,
    )
    return field


def write_sidecar(path: str | Path, field: ClipMotionField, fmt: str = "mvs1") -> None:
    """Write *field* to *path* using the named format ('jsonl' or 'mvs1')."""
    try:
        codec = CODECS[fmt]
    except KeyError as exc:
        raise ValueError(f"Unknown sidecar format {fmt!r}; use one of {sorted(CODECS)}") from exc
    Path(path).write_bytes(codec.write(field))
    logger.info("Wrote %d motion vectors to %s (%s)", len(field), path, fmt)
