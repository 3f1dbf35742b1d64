"""Input layer: decode motion-vector sidecars and frame images.

Motion vectors are extracted from the bitstream by an external decoder and
handed over as sidecar files.  Every codec implements ``SidecarCodec`` so the
rest of the pipeline never cares which carrier a clip arrived in.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import BinaryIO

from mocrop.models import ClipMotionField


class SidecarCodec(ABC):
    """Interface that all sidecar formats must implement."""

    @abstractmethod
    def parse(self, stream: BinaryIO, *, clip_id: str = "") -> ClipMotionField:
        """Decode *stream* into a validated field.

        Implementations raise ``SidecarFormatError`` for undecodable input and
        ``ValidationError`` for records that break the field invariants; a
        partially valid field is never returned.  *clip_id* is used only by
        formats that do not carry one themselves.
        """

    @abstractmethod
    def write(self, field: ClipMotionField) -> bytes:
        """Encode *field* so that ``parse`` returns an equal field."""

    @property
    @abstractmethod
    def format_name(self) -> str:
        """Short name used in logs and CLI flags (e.g. 'jsonl')."""
