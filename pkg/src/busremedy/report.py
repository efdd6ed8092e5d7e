"""Comparison metrics between network snapshots and deterministic file output.

All per-tile comparisons are relative changes (after - before) / before computed
on the accessibility fields of two snapshots over the same grid. Tiles whose
"before" value is zero cannot be expressed as a ratio; they are excluded from
ratio statistics and surfaced through `excluded_tiles` so reports stay honest
about coverage.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .accessibility import AccessibilityField
from .errors import IoFailure
from .network import TransitNetwork, headway, line_length_km
from .tessellation import TileGrid


@dataclass(frozen=True)
class DeltaField:
    """Per-tile relative change of accessibility between two snapshots."""

    before_tag: str
    after_tag: str
    ratios: dict[int, float]
    excluded_tiles: tuple[int, ...]

    @property
    def mean_ratio(self) -> float:
        if not self.ratios:
            return 0.0
        return sum(self.ratios.values()) / len(self.ratios)


def delta_field(after: AccessibilityField, before: AccessibilityField) -> DeltaField:
    if set(after.values) != set(before.values):
        raise ValueError("fields cover different tile sets")
    ratios: dict[int, float] = {}
    excluded: list[int] = []
    for tid in sorted(before.values):
        base = before.values[tid]
        if base == 0.0:
            excluded.append(tid)
            continue
        ratios[tid] = (after.values[tid] - base) / base
    return DeltaField(before.network_tag, after.network_tag, ratios, tuple(excluded))


def mean_ratio(field: AccessibilityField, base: AccessibilityField) -> float:
    """Average access of a snapshot relative to a base snapshot's average."""
    if set(field.values) != set(base.values):
        raise ValueError("fields cover different tile sets")
    if base.mean == 0.0:
        raise ValueError("base field has zero mean access")
    return field.mean / base.mean


def improvement_field(
    ours: AccessibilityField, other: AccessibilityField
) -> DeltaField:
    """Per-tile relative gain of one remediation over another, (ours-other)/other."""
    return delta_field(ours, other)


def ecdf(values: Sequence[float]) -> tuple[list[float], list[float]]:
    """Right-continuous empirical CDF as (sorted values, cumulative fractions)."""
    xs = sorted(values)
    n = len(xs)
    return xs, [(i + 1) / n for i in range(n)]


def quantile(values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile over a non-empty sample."""
    xs = sorted(values)
    if not xs:
        raise ValueError("empty sample")
    pos = q * (len(xs) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return xs[lo]
    frac = pos - lo
    return xs[lo] * (1 - frac) + xs[hi] * frac


def decile_groups(impact: Mapping[int, float]) -> list[list[int]]:
    """Tiles bucketed into ten groups ordered from most to least negative impact.

    Ties broken by tile id; group sizes differ by at most one.
    """
    order = sorted(impact, key=lambda tid: (impact[tid], tid))
    n = len(order)
    groups: list[list[int]] = []
    start = 0
    for i in range(10):
        size = n // 10 + (1 if i < n % 10 else 0)
        groups.append(order[start : start + size])
        start += size
    return groups


def median(values: Sequence[float]) -> float:
    return quantile(values, 0.5)


def decile_median_improvement(
    impact: Mapping[int, float], improvement: Mapping[int, float]
) -> list[float]:
    """Median improvement per impact decile, most affected decile first.

    Tiles missing from `improvement` (zero base) are skipped; an empty decile
    yields nan so callers can see the gap instead of a silent drop.
    """
    out = []
    for group in decile_groups(impact):
        vals = [improvement[t] for t in group if t in improvement]
        out.append(median(vals) if vals else math.nan)
    return out


def operating_distance_kmh(net: TransitNetwork) -> float:
    """Total km driven per hour by every active line at its current headway."""
    total = 0.0
    for line in net.active_lines():
        total += line_length_km(net, line) * (60.0 / headway(net, line))
    return total


@dataclass(frozen=True)
class Comparison:
    """One before/after pairing with its summary statistics."""

    before_tag: str
    after_tag: str
    mean_ratio: float
    median_ratio: float
    overall_before: float
    overall_after: float
    operating_before_kmh: float
    operating_after_kmh: float
    excluded_tiles: int


def compare(
    before_net: TransitNetwork,
    after_net: TransitNetwork,
    before_field: AccessibilityField,
    after_field: AccessibilityField,
) -> tuple[Comparison, DeltaField]:
    delta = delta_field(after_field, before_field)
    ratios = list(delta.ratios.values())
    comp = Comparison(
        before_tag=before_field.network_tag,
        after_tag=after_field.network_tag,
        mean_ratio=delta.mean_ratio,
        median_ratio=median(ratios) if ratios else 0.0,
        overall_before=before_field.total,
        overall_after=after_field.total,
        operating_before_kmh=operating_distance_kmh(before_net),
        operating_after_kmh=operating_distance_kmh(after_net),
        excluded_tiles=len(delta.excluded_tiles),
    )
    return comp, delta


# --- deterministic writers ----------------------------------------------------

def write_field_csv(field: AccessibilityField, grid: TileGrid, path) -> None:
    """tile_id,x_m,y_m,opportunities,access rows sorted by tile id."""
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tile_id", "x_m", "y_m", "opportunities", "access"])
            for tid in sorted(field.values):
                x, y = grid.centroid(tid)
                writer.writerow(
                    [tid, repr(x), repr(y), repr(grid.opportunities[tid]), repr(field.values[tid])]
                )
    except OSError as exc:
        raise IoFailure(f"cannot write {path!r}: {exc}") from exc


def write_delta_csv(delta: DeltaField, path) -> None:
    try:
        with open(path, "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tile_id", "relative_change"])
            for tid in sorted(delta.ratios):
                writer.writerow([tid, repr(delta.ratios[tid])])
    except OSError as exc:
        raise IoFailure(f"cannot write {path!r}: {exc}") from exc


def field_geojson(field: AccessibilityField, grid: TileGrid) -> dict:
    """FeatureCollection of square tile polygons carrying access values."""
    features = []
    for tid in sorted(field.values):
        x0, y0, x1, y1 = grid.tile_bounds(tid)
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
                    ],
                },
                "properties": {
                    "tile_id": tid,
                    "opportunities": grid.opportunities[tid],
                    "access": field.values[tid],
                },
            }
        )
    return {"type": "FeatureCollection", "features": features}


def map_geojson(delta: DeltaField, grid: TileGrid, net: TransitNetwork) -> dict:
    """Tiles carrying delta attributes plus one LineString per active line."""
    features = []
    for tid in sorted(set(delta.ratios) | set(delta.excluded_tiles)):
        x0, y0, x1, y1 = grid.tile_bounds(tid)
        props: dict = {"tile_id": tid}
        if tid in delta.ratios:
            props["relative_change"] = delta.ratios[tid]
        else:
            props["relative_change"] = None
            props["excluded_zero_base"] = True
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [
                        [[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
                    ],
                },
                "properties": props,
            }
        )
    for line in net.active_lines():
        coords = [[net.node(s).x_m, net.node(s).y_m] for s in line.stops]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": coords},
                "properties": {"line_id": line.id, "mode": line.mode.value, "fleet": line.fleet},
            }
        )
    return {"type": "FeatureCollection", "features": features}


def write_map_geojson(delta: DeltaField, grid: TileGrid, net: TransitNetwork, path) -> None:
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(map_geojson(delta, grid, net), fh, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path!r}: {exc}") from exc


def write_field_geojson(field: AccessibilityField, grid: TileGrid, path) -> None:
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(field_geojson(field, grid), fh, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path!r}: {exc}") from exc


def comparison_to_dict(comp: Comparison) -> dict:
    return {
        "before": comp.before_tag,
        "after": comp.after_tag,
        "mean_relative_change": comp.mean_ratio,
        "median_relative_change": comp.median_ratio,
        "overall_access_before": comp.overall_before,
        "overall_access_after": comp.overall_after,
        "operating_distance_before_kmh": comp.operating_before_kmh,
        "operating_distance_after_kmh": comp.operating_after_kmh,
        "tiles_excluded_zero_base": comp.excluded_tiles,
    }


def write_comparison_json(comparisons: Sequence[Comparison], path) -> None:
    payload = [comparison_to_dict(c) for c in comparisons]
    try:
        with open(path, "w", encoding="ascii") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path!r}: {exc}") from exc
