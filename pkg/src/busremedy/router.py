"""Shortest travel times on a boarding-expanded graph.

Every network node gets a street vertex. Every (active line, stop position)
pair gets two vertices: "arrived aboard" and "departing aboard". Arcs:

  board   street(stop)        -> departing(line, p)   cost = headway / 2
  ride    departing(line, p)  -> arrived(line, p+-1)  cost = leg running time
  stay    arrived(line, p)    -> departing(line, p)   cost = line dwell
  alight  arrived(line, p)    -> street(stop)         cost = 0

so a journey pays half a headway per boarding, running time per leg, and dwell
only at the intermediate stops it rides through. Walking arcs join every node
pair within the walk radius (Euclidean), and every pair of tile centroids
regardless of radius, so a direct walk is always an option between centroids.
Rides are offered in both directions (out-and-back operation). Disrupted
stations accept bus boardings only.

The search itself is Dijkstra over the assembled sparse matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import UnknownOrigin
from .network import RAIL_MODES, NodeKind, TransitNetwork, headway, leg_minutes

DEFAULT_WALK_RADIUS_KM = 1.5
DEFAULT_WALKING_SPEED_KMH = 3.5


@dataclass(frozen=True)
class TravelTimeTable:
    origin: str
    network_tag: str
    times_min: Mapping[int, float]  # tile id -> minutes


class RoutingGraph:
    """Boarding-expanded graph of one network snapshot."""

    def __init__(
        self,
        net: TransitNetwork,
        walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
        walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
    ):
        self.net = net
        self.walk_radius_km = walk_radius_km
        self.walking_speed_kmh = walking_speed_kmh

        nodes = sorted(net.nodes, key=lambda n: n.id)
        self._street = {n.id: i for i, n in enumerate(nodes)}
        coords = np.array([(n.x_m, n.y_m) for n in nodes]) / 1000.0  # km
        is_centroid = np.array([n.kind is NodeKind.CENTROID for n in nodes])
        closed = set(net.disrupted_stations)

        self.centroid_cols: list[int] = []
        self.centroid_tiles: list[int] = []
        for i, n in enumerate(nodes):
            if n.kind is NodeKind.CENTROID:
                tid = net.grid.tile_index(n.x_m, n.y_m)
                if tid is None:
                    raise ValueError(f"centroid {n.id!r} lies outside the grid")
                self.centroid_cols.append(i)
                self.centroid_tiles.append(tid)

        rows: list[int] = []
        cols: list[int] = []
        weights: list[float] = []

        # walking: all pairs within radius, plus all centroid pairs
        dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
        n_street = len(nodes)
        pace = 60.0 / walking_speed_kmh  # min per km
        within = dist <= walk_radius_km
        both_centroid = is_centroid[:, None] & is_centroid[None, :]
        walkable = (within | both_centroid) & ~np.eye(n_street, dtype=bool)
        wi, wj = np.nonzero(walkable)
        rows.extend(wi.tolist())
        cols.extend(wj.tolist())
        weights.extend((dist[wi, wj] * pace).tolist())

        nxt = n_street
        for line in net.active_lines():
            h = headway(net, line)
            n_stops = len(line.stops)
            arrived = list(range(nxt, nxt + n_stops))
            departing = list(range(nxt + n_stops, nxt + 2 * n_stops))
            nxt += 2 * n_stops
            for p, stop in enumerate(line.stops):
                boardable = stop not in closed or line.mode not in RAIL_MODES
                s = self._street[stop]
                if boardable:
                    rows.append(s)
                    cols.append(departing[p])
                    weights.append(h / 2.0)
                    rows.append(arrived[p])
                    cols.append(s)
                    weights.append(0.0)
                rows.append(arrived[p])
                cols.append(departing[p])
                weights.append(line.dwell_min)
            for p in range(n_stops - 1):
                t = leg_minutes(net, line, p)
                rows.append(departing[p])
                cols.append(arrived[p + 1])
                weights.append(t)
                rows.append(departing[p + 1])
                cols.append(arrived[p])
                weights.append(t)

        self._n_vertices = nxt
        self._matrix = csr_matrix(
            (np.array(weights), (np.array(rows), np.array(cols))),
            shape=(nxt, nxt),
        )

    def times_from(self, origins: Sequence[str]) -> np.ndarray:
        """Minutes from each origin node to every tile centroid.

        Returns an array of shape (len(origins), n_centroids); columns follow
        self.centroid_tiles.
        """
        idx = []
        for o in origins:
            if o not in self._street:
                raise UnknownOrigin(f"no node {o!r} in network {self.net.tag!r}")
            idx.append(self._street[o])
        full = dijkstra(self._matrix, directed=True, indices=idx)
        return full[:, self.centroid_cols]


def centroid_node_ids(net: TransitNetwork) -> list[str]:
    """Centroid node ids ordered by tile id."""
    pairs = []
    for n in net.centroid_nodes:
        tid = net.grid.tile_index(n.x_m, n.y_m)
        pairs.append((tid, n.id))
    pairs.sort()
    return [nid for _, nid in pairs]


def shortest_times(
    net: TransitNetwork,
    origin: str,
    walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
    walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
) -> TravelTimeTable:
    """One-to-all travel times from a node to every tile centroid."""
    graph = RoutingGraph(net, walk_radius_km, walking_speed_kmh)
    row = graph.times_from([origin])[0]
    times = {tid: float(t) for tid, t in zip(graph.centroid_tiles, row)}
    return TravelTimeTable(origin=origin, network_tag=net.tag, times_min=times)


def all_centroid_times(
    net: TransitNetwork,
    walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
    walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
) -> tuple[list[int], np.ndarray]:
    """Centroid-to-centroid travel time matrix.

    Returns (tile ids, matrix) where rows and columns both follow the tile id
    order. Entry [i, j] is the time from centroid i to centroid j.
    """
    graph = RoutingGraph(net, walk_radius_km, walking_speed_kmh)
    order = centroid_node_ids(net)
    mat = graph.times_from(order)
    col_order = np.argsort(np.array(graph.centroid_tiles))
    tiles = [graph.centroid_tiles[i] for i in col_order]
    return tiles, mat[:, col_order]


def node_time_rows(
    net: TransitNetwork,
    node_ids: Iterable[str],
    walk_radius_km: float = DEFAULT_WALK_RADIUS_KM,
    walking_speed_kmh: float = DEFAULT_WALKING_SPEED_KMH,
) -> dict[str, dict[int, float]]:
    """Travel-time rows (node -> {tile id -> minutes}) for many origins at once."""
    ids = list(node_ids)
    if not ids:
        return {}
    graph = RoutingGraph(net, walk_radius_km, walking_speed_kmh)
    mat = graph.times_from(ids)
    out: dict[str, dict[int, float]] = {}
    for k, nid in enumerate(ids):
        out[nid] = {tid: float(t) for tid, t in zip(graph.centroid_tiles, mat[k])}
    return out
