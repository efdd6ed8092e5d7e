"""Gravity accessibility: opportunities reached per minute of travel.

The score of a place is the sum over all other tiles of tile opportunities
divided by travel time. Same-tile opportunities are excluded: every sum runs
over destinations outside the origin's own tile. Units are opportunities per
minute throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import EmptyCluster, EmptyLine, NonPositiveTime
from .network import Line, TransitNetwork
from .router import (
    DEFAULT_WALK_RADIUS_KM,
    DEFAULT_WALKING_SPEED_KMH,
    all_centroid_times,
    node_time_rows,
)
from .tessellation import TileGrid


@dataclass(frozen=True)
class AccessibilityField:
    network_tag: str
    values: Mapping[int, float]  # tile id -> opportunities per minute

    @cached_property
    def mean(self) -> float:
        return sum(self.values.values()) / len(self.values)

    @cached_property
    def total(self) -> float:
        return sum(self.values.values())


def gravity_sum(
    times_min: Mapping[int, float], grid: TileGrid, exclude_tile: int | None
) -> float:
    """Sum of opportunities/time over every tile except the excluded one."""
    acc = 0.0
    for tid, opp in enumerate(grid.opportunities):
        if tid == exclude_tile or opp == 0:
            continue
        t = times_min.get(tid)
        if t is None:
            raise NonPositiveTime(f"no travel time for tile {tid} with opportunities")
        if t <= 0.0:
            raise NonPositiveTime(f"travel time to tile {tid} is {t}; must be positive")
        acc += opp / t
    return acc


def acc_centroid(tile_id: int, times_min: Mapping[int, float], grid: TileGrid) -> float:
    """Accessibility of one tile centroid given its travel-time row."""
    return gravity_sum(times_min, grid, exclude_tile=tile_id)


def acc_overall(field: AccessibilityField) -> float:
    """Network-level index: sum of the per-centroid scores."""
    return field.total


def compute_field(
    net: TransitNetwork,
    walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
    walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
) -> AccessibilityField:
    """Per-centroid accessibility over the whole grid."""
    tiles, mat = all_centroid_times(net, walk_radius_km, walking_speed_kmh)
    values: dict[int, float] = {}
    for i, tid in enumerate(tiles):
        row = {t: float(x) for t, x in zip(tiles, mat[i])}
        values[tid] = acc_centroid(tid, row, net.grid)
    return AccessibilityField(network_tag=net.tag, values=values)


def node_scores(
    net: TransitNetwork,
    node_ids: Iterable[str],
    walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
    walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
) -> dict[str, float]:
    """Gravity sum per node, excluding each node's own tile."""
    ids = sorted(set(node_ids))
    rows = node_time_rows(net, ids, walk_radius_km, walking_speed_kmh)
    out: dict[str, float] = {}
    for nid in ids:
        n = net.node(nid)
        own = net.grid.tile_index(n.x_m, n.y_m)
        out[nid] = gravity_sum(rows[nid], net.grid, exclude_tile=own)
    return out


def acc_node(net: TransitNetwork, node_id: str, **kw) -> float:
    return node_scores(net, [node_id], **kw)[node_id]


def acc_line(net: TransitNetwork, line: Line | str, **kw) -> float:
    """Mean of the stop-level gravity sums along a line."""
    if isinstance(line, str):
        line = net.line(line)
    if not line.stops:
        raise EmptyLine(f"line {line.id!r} has no stops")
    per_stop = node_scores(net, set(line.stops), **kw)
    return sum(per_stop[s] for s in set(line.stops)) / len(set(line.stops))


def line_scores(
    net: TransitNetwork, lines: Iterable[Line], **kw
) -> tuple[dict[str, float], dict[str, float]]:
    """(line id -> mean stop score, node id -> score) in one routing pass."""
    lines = list(lines)
    wanted: set[str] = set()
    for l in lines:
        wanted.update(l.stops)
    per_node = node_scores(net, wanted, **kw)
    per_line = {}
    for l in lines:
        if not l.stops:
            raise EmptyLine(f"line {l.id!r} has no stops")
        uniq = sorted(set(l.stops))
        per_line[l.id] = sum(per_node[s] for s in uniq) / len(uniq)
    return per_line, per_node


def acc_cluster(node_values: Mapping[str, float], members: Iterable[str]) -> float:
    """Mean node score over a cluster's members."""
    members = list(members)
    if not members:
        raise EmptyCluster("cluster has no members")
    return sum(node_values[m] for m in members) / len(members)


def acc_pairing(line_value: float, cluster_value: float) -> float:
    """Joint score of serving a cluster with an extension of a line."""
    return line_value + cluster_value
