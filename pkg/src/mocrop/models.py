"""Core data models shared across all layers.

Everything here is immutable after construction.  Validation happens in
``__post_init__`` so a value that exists is a value that satisfies its
invariants; the algorithms in ``processing`` and ``modeling`` rely on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from mocrop.errors import ValidationError

# Upper bound on h*w so the naive O(R^3 C^3) search stays tractable.
DEFAULT_MAX_GRID_CELLS = 4096

# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class CropMode(Enum):
    """How a clip's crop box was obtained."""

    ADAPTIVE = "adaptive"
    CENTER_FALLBACK = "center_fallback"


# ---------------------------------------------------------------------------
# Motion vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MotionVector:
    """One codec motion vector: an origin point plus a displacement.

    Origins are sub-pixel in the frame coordinate system, (0, 0) top-left.
    """

    frame_index: int
    x: float
    y: float
    dx: float
    dy: float

    @property
    def origin(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def displacement(self) -> tuple[float, float]:
        return (self.dx, self.dy)


def magnitude(v: MotionVector) -> float:
    """Euclidean length of the displacement."""
    return math.hypot(v.dx, v.dy)


def origin_problem(v: MotionVector, width: int, height: int) -> str | None:
    """Describe why *v* is invalid for a ``width x height`` frame, if it is."""
    if v.frame_index < 0:
        return f"negative frame index {v.frame_index}"
    if not (math.isfinite(v.dx) and math.isfinite(v.dy)):
        return f"non-finite displacement ({v.dx}, {v.dy})"
    # Half-open bounds; NaN fails both comparisons and is rejected here too.
    if not (0 <= v.x < width and 0 <= v.y < height):
        return f"origin ({v.x}, {v.y}) outside {width}x{height} frame"
    return None


@dataclass(frozen=True)
class ClipMotionField:
    """All motion vectors of one clip, in ingest order."""

    frame_size: tuple[int, int]  # (W_video, H_video)
    vectors: tuple[MotionVector, ...] = ()
    clip_id: str = ""

    def __post_init__(self) -> None:
        width, height = self.frame_size
        if width < 1 or height < 1:
            raise ValidationError(f"Frame size must be positive, got {width}x{height}")
        if not isinstance(self.vectors, tuple):
            object.__setattr__(self, "vectors", tuple(self.vectors))
        for k, v in enumerate(self.vectors):
            problem = origin_problem(v, width, height)
            if problem is not None:
                raise ValidationError(f"Motion vector record {k}: {problem}")

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def width(self) -> int:
        return self.frame_size[0]

    @property
    def height(self) -> int:
        return self.frame_size[1]

    def with_vectors(
        self, vectors: tuple[MotionVector, ...] | list[MotionVector]
    ) -> ClipMotionField:
        """Return a field with the same frame and clip id but new vectors."""
        return ClipMotionField(self.frame_size, tuple(vectors), self.clip_id)

    def origins(self) -> np.ndarray:
        """``(n, 2)`` float64 array of ``(x, y)`` origins."""
        if not self.vectors:
            return np.zeros((0, 2), dtype=np.float64)
        return np.array([(v.x, v.y) for v in self.vectors], dtype=np.float64)

    def magnitudes(self) -> np.ndarray:
        return np.array([magnitude(v) for v in self.vectors], dtype=np.float64)


# ---------------------------------------------------------------------------
# Grid and density map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """An ``rows x cols`` discretization of the frame (h x w)."""

    rows: int
    cols: int
    max_cells: int = field(default=DEFAULT_MAX_GRID_CELLS, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"Grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.rows * self.cols > self.max_cells:
            raise ValidationError(
                f"Grid {self.rows}x{self.cols} has {self.rows * self.cols} cells, "
                f"more than the maximum of {self.max_cells}"
            )

    @property
    def cells(self) -> int:
        return self.rows * self.cols

    @classmethod
    def parse(cls, text: str, *, max_cells: int = DEFAULT_MAX_GRID_CELLS) -> GridSpec:
        """Parse ``"6x8"`` (rows x cols)."""
        try:
            rows_s, cols_s = text.lower().split("x")
            rows, cols = int(rows_s), int(cols_s)
        except ValueError as exc:
            raise ValidationError(f"Grid must look like 'HxW', got {text!r}") from exc
        return cls(rows, cols, max_cells=max_cells)

    def __str__(self) -> str:
        return f"{self.rows}x{self.cols}"


@dataclass(frozen=True, eq=False)
class MotionDensityMap:
    """The MD map: per-cell counts of sampled motion-vector origins."""

    grid: GridSpec
    counts: np.ndarray  # (rows, cols) int64, read-only

    def __post_init__(self) -> None:
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (self.grid.rows, self.grid.cols):
            raise ValidationError(
                f"Counts shape {counts.shape} does not match grid {self.grid}"
            )
        if counts.size and counts.min() < 0:
            raise ValidationError("Density counts must be non-negative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MotionDensityMap):
            return NotImplemented
        return self.grid == other.grid and bool(np.array_equal(self.counts, other.counts))

    def __hash__(self) -> int:
        return hash((self.grid, self.counts.tobytes()))


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GridBox:
    """A rectangle of cells: top-left ``(i, j)``, ``height x width`` cells."""

    i: int
    j: int
    height: int  # H_s
    width: int  # W_s

    @property
    def area(self) -> int:
        return self.height * self.width

    def fits(self, grid: GridSpec) -> bool:
        return (
            1 <= self.height <= grid.rows
            and 1 <= self.width <= grid.cols
            and 0 <= self.i <= grid.rows - self.height
            and 0 <= self.j <= grid.cols - self.width
        )


@dataclass(frozen=True)
class NormalizedBox:
    """Center/size box as fractions of the frame: ``(c_x, c_y, w_b, h_b)``."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if not (0.0 < self.w <= 1.0 and 0.0 < self.h <= 1.0):
            raise ValidationError(f"Normalized size ({self.w}, {self.h}) outside (0, 1]")
        if not (0.0 <= self.cx <= 1.0 and 0.0 <= self.cy <= 1.0):
            raise ValidationError(f"Normalized center ({self.cx}, {self.cy}) outside [0, 1]")


@dataclass(frozen=True)
class PixelBox:
    """Half-open pixel rectangle ``[x1, x2) x [y1, y2)``."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self) -> None:
        if not (0 <= self.x1 < self.x2 and 0 <= self.y1 < self.y2):
            raise ValidationError(
                f"Pixel box ({self.x1}, {self.y1}, {self.x2}, {self.y2}) is empty or negative"
            )

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    @property
    def area(self) -> int:
        return self.width * self.height

    def within(self, frame_size: tuple[int, int]) -> bool:
        return self.x2 <= frame_size[0] and self.y2 <= frame_size[1]


# ---------------------------------------------------------------------------
# Frames and decisions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """An RGB frame, row-major, 3 bytes per pixel."""

    width: int
    height: int
    data: bytes

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValidationError(f"Frame size must be positive, got {self.width}x{self.height}")
        expected = self.width * self.height * 3
        if len(self.data) != expected:
            raise ValidationError(
                f"Frame {self.width}x{self.height} needs {expected} bytes, got {len(self.data)}"
            )

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    def array(self) -> np.ndarray:
        """Read-only ``(height, width, 3)`` uint8 view of the pixels."""
        return np.frombuffer(self.data, dtype=np.uint8).reshape(self.height, self.width, 3)

    @classmethod
    def from_array(cls, pixels: np.ndarray) -> Frame:
        pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        height, width, channels = pixels.shape
        if channels != 3:
            raise ValidationError(f"Expected 3 channels, got {channels}")
        return cls(width, height, pixels.tobytes())


@dataclass(frozen=True)
class CropDecision:
    """The single clip-level crop ``B*`` in all three coordinate systems."""

    normalized: NormalizedBox
    pixel: PixelBox
    mode: CropMode
    score: int  # motion mass inside grid_box; 0 for fallback
    md_map: MotionDensityMap  # kept for diagnostics and rendering
    grid_box: GridBox | None = None  # None when mode is CENTER_FALLBACK

    def __post_init__(self) -> None:
        if self.mode is CropMode.ADAPTIVE:
            if self.grid_box is None:
                raise ValidationError("An adaptive decision needs its grid box")
            if not self.grid_box.fits(self.md_map.grid):
                raise ValidationError(f"{self.grid_box} does not fit a {self.md_map.grid} grid")
            if self.score < 0:
                raise ValidationError(f"Score must be non-negative, got {self.score}")
        elif self.grid_box is not None or self.score != 0:
            raise ValidationError("A center fallback carries no grid box and score 0")
