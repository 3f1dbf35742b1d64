"""Exception hierarchy shared by every layer.

All errors derive from ``ValueError`` so callers that only care about "bad
input" can keep catching the builtin.  The CLI maps each class onto a stable
exit code (see ``mocrop.cli``).
"""

from __future__ import annotations


class MoCropError(ValueError):
    """Base class for all mocrop errors."""


class SidecarFormatError(MoCropError):
    """A motion-vector sidecar could not be decoded.

    ``line`` is the 1-based line number for JSONL input, ``None`` for binary.
    """

    def __init__(self, message: str, *, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FrameFormatError(MoCropError):
    """A frame image is not a supported binary PPM."""


class ValidationError(MoCropError):
    """Decoded data violates a domain invariant (bounds, frame size)."""


class ConfigError(MoCropError):
    """A configuration was rejected at load time."""


class DegenerateBoxError(MoCropError):
    """Pixel mapping collapsed a box to zero width or height."""
