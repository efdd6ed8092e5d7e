"""Regular square tessellation of the study area.

The grid covers the bounding rectangle with a ceiling number of tiles per axis,
origin at the lower-left corner. Point membership uses half-open tiles
[lo, lo + len) on each axis, with the outer edge of the last row/column closed
so that every coordinate of the covered area maps to exactly one tile.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DegenerateBounds

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tile:
    id: int
    x_m: float  # centroid
    y_m: float
    opportunities: int = 0


@dataclass(frozen=True)
class TileGrid:
    x_min_m: float
    y_min_m: float
    tile_len_m: float
    nx: int
    ny: int
    opportunities: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.opportunities) != self.nx * self.ny:
            raise ValueError("opportunity vector length must equal nx*ny")

    @property
    def n_tiles(self) -> int:
        return self.nx * self.ny

    def centroid(self, tile_id: int) -> tuple[float, float]:
        ix = tile_id % self.nx
        iy = tile_id // self.nx
        half = 0.5 * self.tile_len_m
        return (self.x_min_m + ix * self.tile_len_m + half,
                self.y_min_m + iy * self.tile_len_m + half)

    @cached_property
    def tiles(self) -> tuple[Tile, ...]:
        out = []
        for tid in range(self.n_tiles):
            x, y = self.centroid(tid)
            out.append(Tile(tid, x, y, self.opportunities[tid]))
        return tuple(out)

    def tile_index(self, x_m: float, y_m: float) -> int | None:
        """Tile containing the point, or None when it lies outside the grid."""
        dx = x_m - self.x_min_m
        dy = y_m - self.y_min_m
        if dx < 0 or dy < 0:
            return None
        if dx > self.nx * self.tile_len_m or dy > self.ny * self.tile_len_m:
            return None
        ix = min(int(dx // self.tile_len_m), self.nx - 1)
        iy = min(int(dy // self.tile_len_m), self.ny - 1)
        return iy * self.nx + ix

    def tile_bounds(self, tile_id: int) -> tuple[float, float, float, float]:
        ix = tile_id % self.nx
        iy = tile_id // self.nx
        x0 = self.x_min_m + ix * self.tile_len_m
        y0 = self.y_min_m + iy * self.tile_len_m
        return (x0, y0, x0 + self.tile_len_m, y0 + self.tile_len_m)


def tessellate(bounds_m: Sequence[float], tile_len_km: float = 1.0) -> TileGrid:
    """Cover the rectangle (x_min, y_min, x_max, y_max) with square tiles."""
    x_min, y_min, x_max, y_max = (float(v) for v in bounds_m)
    if not (x_max > x_min and y_max > y_min):
        raise DegenerateBounds(f"bounds {bounds_m!r} enclose no area")
    if tile_len_km <= 0:
        raise DegenerateBounds(f"tile length {tile_len_km} km must be positive")
    side = tile_len_km * 1000.0
    nx = math.ceil((x_max - x_min) / side)
    ny = math.ceil((y_max - y_min) / side)
    return TileGrid(x_min, y_min, side, nx, ny, (0,) * (nx * ny))


def count_opportunities(
    grid: TileGrid, points_m: Iterable[tuple[float, float]]
) -> tuple[TileGrid, int]:
    """Count opportunity points per tile.

    Points outside the grid are dropped; the drop count is returned and logged.
    """
    counts = [0] * grid.n_tiles
    dropped = 0
    for x, y in points_m:
        tid = grid.tile_index(x, y)
        if tid is None:
            dropped += 1
        else:
            counts[tid] += 1
    if dropped:
        log.warning("dropped %d opportunity points outside the study area", dropped)
    return replace(grid, opportunities=tuple(counts)), dropped
