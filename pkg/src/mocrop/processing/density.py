"""Stage 2: Monte Carlo sampling and the motion-density (MD) map.

Sampling draws ``min(N, |V|)`` vectors uniformly without replacement with a
single-pass reservoir (Algorithm R) over ingest order.  Randomness comes
from NumPy's PCG64 generator, so a ``(field, N, seed)`` triple yields the
same sample on every platform.

The MD map counts sampled origins per half-open grid cell.
"""

from __future__ import annotations

import logging

import numpy as np

from mocrop.input.netpbm import write_pgm
from mocrop.models import ClipMotionField, GridSpec, MotionDensityMap

logger = logging.getLogger(__name__)


def make_rng(seed: int) -> np.random.Generator:
    """The pipeline's only source of randomness: PCG64 seeded with *seed*."""
    return np.random.Generator(np.random.PCG64(seed))


def reservoir_indices(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of a uniform size-``min(k, n)`` subset of ``range(n)``, ascending.

    Algorithm R: the first *k* items fill the reservoir; item ``t`` (0-based,
    ``t >= k``) replaces slot ``r ~ U{0..t}`` when ``r < k``.

    Draws come straight from the bit generator's raw 64-bit stream, which
    NumPy keeps stable across releases, and are bounded with an exact
    multiply-shift ``r = (u * (t + 1)) >> 64``.  The bias is at most
    ``(t + 1) / 2**64`` per draw.
    """
    if k >= n:
        return np.arange(n)
    reservoir = np.arange(k)
    raw = rng.bit_generator.random_raw(n - k)
    for t, u in enumerate(raw.tolist(), start=k):
        r = (u * (t + 1)) >> 64
        if r < k:
            reservoir[r] = t
    return np.sort(reservoir)


def mc_sample(field: ClipMotionField, n_samples: int, seed: int) -> ClipMotionField:
    """Uniformly sample ``min(n_samples, |field|)`` vectors, keeping input order.

    When the budget covers the whole field the input is returned unchanged.
    """
    if n_samples < 1:
        raise ValueError(f"Sample budget must be positive, got {n_samples}")
    if n_samples >= len(field):
        logger.debug("Sample budget %d covers all %d vectors", n_samples, len(field))
        return field
    keep = reservoir_indices(len(field), n_samples, make_rng(seed))
    vectors = field.vectors
    sampled = [vectors[t] for t in keep.tolist()]
    logger.info("Sampled %d of %d motion vectors (seed=%d)", len(sampled), len(field), seed)
    return field.with_vectors(sampled)


def cell_indices(field: ClipMotionField, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row and column cell index of every origin.

    ``i = floor(y * h / H)``, ``j = floor(x * w / W)``; the clip only absorbs
    float rounding at the far edges since ingest rejects out-of-bounds origins.
    """
    origins = field.origins()
    rows = np.floor(origins[:, 1] * grid.rows / field.height).astype(np.int64)
    cols = np.floor(origins[:, 0] * grid.cols / field.width).astype(np.int64)
    return np.clip(rows, 0, grid.rows - 1), np.clip(cols, 0, grid.cols - 1)


def build_md_map(field: ClipMotionField, grid: GridSpec) -> MotionDensityMap:
    """Count origins per cell; ``total`` equals ``len(field)``."""
    rows, cols = cell_indices(field, grid)
    flat = np.bincount(rows * grid.cols + cols, minlength=grid.cells)
    md_map = MotionDensityMap(grid, flat.reshape(grid.rows, grid.cols))
    logger.info(
        "Built %s MD map from %d vectors (peak cell %d)",
        grid, md_map.total, int(md_map.counts.max()),
    )
    return md_map


def is_flat(md_map: MotionDensityMap, threshold: float) -> bool:
    """True when the map carries no usable concentration.

    Flat means zero total, or a max-min spread of at most
    ``threshold * max(total, 1) / (h * w)``; threshold 0 means "all equal".
    """
    if not 0 <= threshold <= 1:
        raise ValueError(f"Flatness threshold must be in [0, 1], got {threshold}")
    total = md_map.total
    if total == 0:
        return True
    spread = int(md_map.counts.max()) - int(md_map.counts.min())
    return spread <= threshold * max(total, 1) / md_map.grid.cells


def md_map_pixels(md_map: MotionDensityMap) -> bytes:
    """Counts rescaled to 0..255 (floor), row-major; all zero stays zero."""
    peak = int(md_map.counts.max())
    if peak == 0:
        return bytes(md_map.grid.cells)
    scaled = md_map.counts * 255 // peak
    return scaled.astype(np.uint8).tobytes()


def render_pgm(md_map: MotionDensityMap) -> bytes:
    """Export the MD map as a ``w x h`` binary PGM."""
    return write_pgm(md_map.grid.cols, md_map.grid.rows, md_map_pixels(md_map))
