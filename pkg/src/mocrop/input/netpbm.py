"""Binary netpbm I/O: PPM (P6) frames in and out, PGM (P5) for MD maps.

Only maxval 255 is supported.  Writers emit single-whitespace headers
(``P6\\n<w> <h>\\n255\\n``) so output is byte-stable for golden tests;
the reader also accepts ``#`` comments and runs of whitespace.
"""

from __future__ import annotations

from typing import BinaryIO

from mocrop.errors import FrameFormatError
from mocrop.models import Frame

_WHITESPACE = b" \t\r\n\v\f"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read *count* whitespace-separated header tokens after the magic.

    Returns the tokens and the offset of the first raster byte (one
    whitespace byte after the last token).
    """
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < count:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE:
            pos += 1
        if start == pos:
            raise FrameFormatError("truncated netpbm header")
        tokens.append(data[start:pos])
    if pos >= len(data):
        raise FrameFormatError("truncated netpbm header: no raster data")
    return tokens, pos + 1


def read_ppm(stream: BinaryIO) -> Frame:
    """Decode a binary PPM (``P6``, maxval 255) into a ``Frame``."""
    data = stream.read()
    magic = data[:2]
    if magic != b"P6":
        raise FrameFormatError(f"unsupported format {magic!r}: only binary PPM 'P6' is read")
    tokens, offset = _header_tokens(data, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FrameFormatError(f"non-numeric PPM header fields {tokens!r}") from exc
    if maxval != 255:
        raise FrameFormatError(f"unsupported maxval {maxval}, only 255 is supported")
    if width < 1 or height < 1:
        raise FrameFormatError(f"invalid PPM size {width}x{height}")

    expected = width * height * 3
    pixels = data[offset : offset + expected]
    if len(pixels) < expected:
        raise FrameFormatError(
            f"truncated pixel data: expected {expected} bytes, got {len(pixels)}"
        )
    return Frame(width, height, pixels)


def write_ppm(frame: Frame) -> bytes:
    """Encode *frame* as ``P6``; ``read_ppm`` restores it byte for byte."""
    return f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii") + frame.data


def write_pgm(width: int, height: int, pixels: bytes) -> bytes:
    """Encode a single-channel 8-bit raster as ``P5``."""
    if len(pixels) != width * height:
        raise ValueError(f"PGM {width}x{height} needs {width * height} bytes, got {len(pixels)}")
    return f"P5\n{width} {height}\n255\n".encode("ascii") + pixels
