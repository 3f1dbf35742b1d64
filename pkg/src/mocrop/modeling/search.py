"""Stage 3: area-constrained maximum-mass submatrix search (AC).

Finds the grid rectangle ``(i, j, H_s, W_s)`` of maximal motion mass among
all rectangles whose cell area lies in the band
``[(1 - delta) * alpha * h * w, (1 + delta) * alpha * h * w]``.

Three interchangeable backends share one contract and one tie-break:

- ``search_naive`` sums every candidate window directly, worst case
  ``O(R^3 C^3)``.  It is the reference oracle and shares no code with the
  other two.
- ``search_integral`` scores each window in ``O(1)`` from a summed-area
  table, ``O(#candidates)`` overall.  This is the production default.
- ``search_sliding`` handles one fixed shape with row-wise then column-wise
  running sums, ``O(hw)``.

Ties are broken by highest score, then smallest ``i``, ``j``, ``H_s``,
``W_s``, which is exactly the field order of ``GridBox``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from mocrop.errors import ConfigError
from mocrop.models import GridBox, GridSpec, MotionDensityMap

logger = logging.getLogger(__name__)

# Absorbs float error in alpha*h*w (e.g. 0.7 * 10 = 7.000000000000001).
AREA_TOLERANCE = 1e-9

Shape = tuple[int, int]


# ---------------------------------------------------------------------------
# Admissible shapes
# ---------------------------------------------------------------------------


def area_band(grid: GridSpec, alpha: float, delta: float) -> tuple[float, float]:
    """Inclusive ``(low, high)`` cell-area bounds for a target ratio."""
    target = alpha * grid.rows * grid.cols
    return (1 - delta) * target, (1 + delta) * target


def in_band(area: int, band: tuple[float, float]) -> bool:
    low, high = band
    return low - AREA_TOLERANCE <= area <= high + AREA_TOLERANCE


@dataclass(frozen=True)
class ShapeSet:
    """Every ``(H_s, W_s)`` in the area band, sorted ascending."""

    grid: GridSpec
    alpha: float
    delta: float
    shapes: tuple[Shape, ...]

    def __iter__(self) -> Iterator[Shape]:
        return iter(self.shapes)

    def __len__(self) -> int:
        return len(self.shapes)


@lru_cache(maxsize=256)
def _band_shapes(rows: int, cols: int, alpha: float, delta: float) -> tuple[Shape, ...]:
    band = area_band(GridSpec(rows, cols, max_cells=rows * cols), alpha, delta)
    return tuple(
        (height, width)
        for height in range(1, rows + 1)
        for width in range(1, cols + 1)
        if in_band(height * width, band)
    )


def enumerate_shapes(grid: GridSpec, alpha: float, delta: float) -> ShapeSet:
    """All and only the admissible shapes for ``(grid, alpha, delta)``.

    Results are cached per ``(grid, alpha, delta)``.
    """
    shapes = _band_shapes(grid.rows, grid.cols, alpha, delta)
    if not shapes:
        low, high = area_band(grid, alpha, delta)
        msg = (
            f"No rectangle on a {grid} grid has an area in "
            f"[{low:.4g}, {high:.4g}] cells (alpha={alpha}, delta={delta})"
        )
        raise ConfigError(msg)
    return ShapeSet(grid, alpha, delta, shapes)


def single_shape(grid: GridSpec, height: int, width: int) -> ShapeSet:
    """A one-element ShapeSet, bypassing the area band."""
    if not (1 <= height <= grid.rows and 1 <= width <= grid.cols):
        raise ValueError(f"Shape {height}x{width} does not fit a {grid} grid")
    return ShapeSet(grid, math.nan, math.nan, ((height, width),))


def _check_grid(md_map: MotionDensityMap, shapes: ShapeSet) -> None:
    if shapes.grid != md_map.grid:
        raise ValueError(f"Shapes were enumerated for {shapes.grid}, map is {md_map.grid}")
    if not shapes.shapes:
        raise ValueError("Shape set is empty")


# ---------------------------------------------------------------------------
# Naive backend (reference oracle)
# ---------------------------------------------------------------------------


def search_naive(md_map: MotionDensityMap, shapes: ShapeSet) -> tuple[GridBox, int]:
    """Score every placement of every shape by direct summation."""
    _check_grid(md_map, shapes)
    counts = md_map.counts.tolist()
    rows, cols = md_map.grid.rows, md_map.grid.cols

    best_score = -1
    best_key = (0, 0, 0, 0)
    for height, width in shapes:
        for i in range(rows - height + 1):
            for j in range(cols - width + 1):
                score = 0
                for p in range(i, i + height):
                    row = counts[p]
                    for q in range(j, j + width):
                        score += row[q]
                key = (i, j, height, width)
                if score > best_score or (score == best_score and key < best_key):
                    best_score, best_key = score, key

    return GridBox(*best_key), best_score


# ---------------------------------------------------------------------------
# Integral-image backend
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """Summed-area table: ``table[i][j]`` is the mass of rows < i, cols < j."""

    grid: GridSpec
    table: np.ndarray  # (rows + 1, cols + 1) int64

    def window_sum(self, box: GridBox) -> int:
        t = self.table
        i2, j2 = box.i + box.height, box.j + box.width
        return int(t[i2, j2] - t[box.i, j2] - t[i2, box.j] + t[box.i, box.j])


def build_integral(md_map: MotionDensityMap) -> IntegralImage:
    grid = md_map.grid
    table = np.zeros((grid.rows + 1, grid.cols + 1), dtype=np.int64)
    table[1:, 1:] = md_map.counts.cumsum(axis=0).cumsum(axis=1)
    table.flags.writeable = False
    return IntegralImage(grid, table)


def _prefer(score: int, box: GridBox, best: tuple[GridBox, int] | None) -> bool:
    if best is None:
        return True
    best_box, best_score = best
    return score > best_score or (score == best_score and box < best_box)


def _first_argmax(sums: np.ndarray) -> tuple[int, int, int]:
    """Row-major first maximum: the smallest ``(i, j)`` among ties."""
    flat = int(np.argmax(sums))
    i, j = divmod(flat, sums.shape[1])
    return i, j, int(sums[i, j])


def search_integral(md_map: MotionDensityMap, shapes: ShapeSet) -> tuple[GridBox, int]:
    """Score windows in O(1) each from the integral image."""
    _check_grid(md_map, shapes)
    t = build_integral(md_map).table
    rows, cols = md_map.grid.rows, md_map.grid.cols

    best: tuple[GridBox, int] | None = None
    for height, width in shapes:
        n_i, n_j = rows - height + 1, cols - width + 1
        sums = (
            t[height : height + n_i, width : width + n_j]
            - t[0:n_i, width : width + n_j]
            - t[height : height + n_i, 0:n_j]
            + t[0:n_i, 0:n_j]
        )
        i, j, score = _first_argmax(sums)
        box = GridBox(i, j, height, width)
        if _prefer(score, box, best):
            best = (box, score)

    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Sliding-window backend
# ---------------------------------------------------------------------------


def _running_window(values: np.ndarray, size: int) -> np.ndarray:
    """Sums of each length-*size* window along axis 1, by running update."""
    n_out = values.shape[1] - size + 1
    out = np.empty((values.shape[0], n_out), dtype=np.int64)
    acc = values[:, :size].sum(axis=1)
    out[:, 0] = acc
    for k in range(1, n_out):
        acc = acc + values[:, k + size - 1] - values[:, k - 1]
        out[:, k] = acc
    return out


def search_sliding(md_map: MotionDensityMap, shape: Shape) -> tuple[GridBox, int]:
    """Best placement of one fixed ``(H_s, W_s)`` shape in O(hw)."""
    height, width = shape
    grid = md_map.grid
    if not (1 <= height <= grid.rows and 1 <= width <= grid.cols):
        raise ValueError(f"Shape {height}x{width} does not fit a {grid} grid")
    row_sums = _running_window(md_map.counts, width)  # (rows, n_j)
    window_sums = _running_window(row_sums.T, height).T  # (n_i, n_j)
    i, j, score = _first_argmax(window_sums)
    return GridBox(i, j, height, width), score


def search_sliding_all(md_map: MotionDensityMap, shapes: ShapeSet) -> tuple[GridBox, int]:
    """Run ``search_sliding`` per shape and keep the best under the tie-break."""
    _check_grid(md_map, shapes)
    best: tuple[GridBox, int] | None = None
    for shape in shapes:
        box, score = search_sliding(md_map, shape)
        if _prefer(score, box, best):
            best = (box, score)
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

BACKENDS = {
    "naive": search_naive,
    "integral": search_integral,
    "sliding": search_sliding_all,
}


def search(
    md_map: MotionDensityMap,
    shapes: ShapeSet,
    backend: str = "integral",
) -> tuple[GridBox, int]:
    """Run the named backend; all return bit-identical results."""
    try:
        fn = BACKENDS[backend]
    except KeyError as exc:
        raise ValueError(f"Unknown search backend {backend!r}") from exc
    box, score = fn(md_map, shapes)
    logger.info(
        "Search (%s) over %d shapes: box i=%d j=%d %dx%d, score %d",
        backend, len(shapes), box.i, box.j, box.height, box.width, score,
    )
    return box, score
