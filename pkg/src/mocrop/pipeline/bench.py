"""Micro-benchmark of the three search backends on random MD maps.

Before anything is timed, every backend is run on every map and the
results must agree exactly; the timings are meaningless otherwise.
"""

from __future__ import annotations

import logging
import statistics
import time
from dataclasses import dataclass

from mocrop.errors import ConfigError
from mocrop.modeling.search import BACKENDS, ShapeSet, enumerate_shapes, single_shape
from mocrop.models import GridBox, GridSpec, MotionDensityMap
from mocrop.processing.density import make_rng

logger = logging.getLogger(__name__)

BENCH_GRIDS = (GridSpec(6, 8), GridSpec(12, 16), GridSpec(24, 32))
DEFAULT_RUNS = 100
MAX_COUNT = 20
N_MAPS = 16


class BackendDisagreementError(RuntimeError):
    """Two backends returned different results for the same map."""

    def __init__(self, md_map: MotionDensityMap, results: dict[str, tuple[GridBox, int]]) -> None:
        detail = "; ".join(
            f"{name}: i={box.i} j={box.j} {box.height}x{box.width} score={score}"
            for name, (box, score) in results.items()
        )
        super().__init__(f"Backends disagree on a {md_map.grid} map: {detail}")
        self.results = results


@dataclass(frozen=True)
class BenchRow:
    grid: GridSpec
    shape_set: str  # "band" or "single"
    backend: str
    n_shapes: int
    median_seconds: float
    runs: int


def random_maps(grid: GridSpec, count: int, seed: int) -> list[MotionDensityMap]:
    rng = make_rng(seed)
    return [
        MotionDensityMap(grid, rng.integers(0, MAX_COUNT + 1, size=(grid.rows, grid.cols)))
        for _ in range(count)
    ]


def check_agreement(maps: list[MotionDensityMap], shapes: ShapeSet) -> None:
    """Raise ``BackendDisagreementError`` unless all backends agree on every map."""
    for md_map in maps:
        results = {name: fn(md_map, shapes) for name, fn in BACKENDS.items()}
        if len(set(results.values())) != 1:
            raise BackendDisagreementError(md_map, results)


def time_backend(
    backend: str,
    maps: list[MotionDensityMap],
    shapes: ShapeSet,
    runs: int,
) -> float:
    """Median wall time of one search call, in seconds."""
    fn = BACKENDS[backend]
    durations = []
    for run in range(runs):
        md_map = maps[run % len(maps)]
        start = time.perf_counter()
        fn(md_map, shapes)
        durations.append(time.perf_counter() - start)
    return statistics.median(durations)


def run_bench(
    grids: tuple[GridSpec, ...] = BENCH_GRIDS,
    *,
    alpha: float = 0.75,
    delta: float = 0.1,
    runs: int = DEFAULT_RUNS,
    seed: int = 0,
) -> list[BenchRow]:
    """Time every backend on every grid, for the area band and a single shape."""
    if runs < 1:
        raise ConfigError(f"runs must be positive, got {runs}")
    rows: list[BenchRow] = []
    for grid in grids:
        maps = random_maps(grid, N_MAPS, seed)
        band = enumerate_shapes(grid, alpha, delta)
        height, width = band.shapes[len(band) // 2]
        for label, shapes in (("band", band), ("single", single_shape(grid, height, width))):
            check_agreement(maps, shapes)
            for backend in BACKENDS:
                median = time_backend(backend, maps, shapes, runs)
                rows.append(BenchRow(grid, label, backend, len(shapes), median, runs))
                logger.debug("%s %s %s: %.3g s", grid, label, backend, median)
    logger.info("Benchmarked %d grids x %d backends", len(grids), len(BACKENDS))
    return rows
