"""Stage 1 of the remediation heuristic: where should buses go?

Three steps. Each disrupted station is consolidated onto the nearest bus stop
within a distance cap (falling back to the station itself). The consolidation
nodes are grouped with DBSCAN. For every (regular bus line, terminal, cluster)
triple the cheapest open path from the terminal through the cluster's members
is routed exactly with a subset dynamic program.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np
from sklearn.cluster import DBSCAN

from .errors import ClusterTooLarge, EmptyCluster
from .network import Line, LineKind, Mode, NodeKind, TransitNetwork, road_distance_km

EXACT_PATH_CAP = 12


@dataclass(frozen=True)
class ConsolidationAssignment:
    station_to_node: Mapping[str, str]

    @cached_property
    def used_nodes(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.station_to_node.values())))

    def demand_per_node(self, demand: Mapping[str, float]) -> dict[str, float]:
        out = {n: 0.0 for n in self.used_nodes}
        for station, node in self.station_to_node.items():
            out[node] += demand.get(station, 0.0)
        return out


@dataclass(frozen=True)
class Cluster:
    id: str
    members: tuple[str, ...]
    demand: float


@dataclass(frozen=True)
class CandidateExtension:
    line_id: str
    terminal: str  # 'a' or 'b'
    cluster_id: str
    order: tuple[str, ...]  # visit order of the cluster members
    length_km: float  # terminal -> ... -> last member, one way
    certified_optimal: bool = True

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.line_id, self.terminal, self.cluster_id)


def assign_consolidation(
    net: TransitNetwork, station_ids: Iterable[str], dmax_m: float = 500.0
) -> ConsolidationAssignment:
    """Map each disrupted station to its boarding point.

    Nearest bus stop within dmax wins, ties broken by lowest stop id; with no
    stop in range the station serves as its own consolidation node.
    """
    stops = sorted(n.id for n in net.nodes if n.kind is NodeKind.BUS_STOP)
    mapping: dict[str, str] = {}
    for sid in sorted(station_ids):
        net.node(sid)  # raises UnknownNode for bad ids
        best: tuple[float, str] | None = None
        for stop in stops:
            d_m = road_distance_km(net, sid, stop) * 1000.0
            if d_m <= dmax_m and (best is None or d_m < best[0]):
                best = (d_m, stop)
        mapping[sid] = best[1] if best is not None else sid
    return ConsolidationAssignment(station_to_node=mapping)


def cluster_nodes(
    net: TransitNetwork,
    assignment: ConsolidationAssignment,
    demand: Mapping[str, float],
    eps_km: float = 2.0,
    min_samples: int = 1,
) -> tuple[Cluster, ...]:
    """Group consolidation nodes with DBSCAN on their planar coordinates.

    With min_samples=1 every node is a core point and the result equals the
    connected components of the eps-neighbourhood graph. Cluster ids are
    assigned in order of each cluster's lowest member id.
    """
    nodes = assignment.used_nodes
    if not nodes:
        return ()
    coords = np.array([(net.node(n).x_m, net.node(n).y_m) for n in nodes])
    labels = DBSCAN(eps=eps_km * 1000.0, min_samples=min_samples).fit(coords).labels_
    by_label: dict[int, list[str]] = {}
    for nid, lab in zip(nodes, labels):
        if lab == -1:  # noise cannot occur at min_samples=1; keep it explicit
            continue
        by_label.setdefault(int(lab), []).append(nid)
    groups = sorted((sorted(members) for members in by_label.values()),
                    key=lambda m: m[0])
    node_demand = assignment.demand_per_node(demand)
    clusters = []
    for i, members in enumerate(groups, start=1):
        q = sum(node_demand.get(m, 0.0) for m in members)
        clusters.append(Cluster(id=f"k{i:02d}", members=tuple(members), demand=q))
    return tuple(clusters)


def _shortest_open_path(
    dist: list[list[float]], start_row: list[float], n: int
) -> tuple[float, tuple[int, ...]]:
    """Exact minimum-length path from the start through all n members.

    Subset DP over (visited mask, last member); the end point is free.
    """
    best: dict[tuple[int, int], tuple[float, int]] = {}
    for j in range(n):
        best[(1 << j, j)] = (start_row[j], -1)
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for last in range(n):
            if not mask & (1 << last) or (mask, last) not in best:
                continue
            cost, _ = best[(mask, last)]
            for j in range(n):
                if mask & (1 << j):
                    continue
                nmask = mask | (1 << j)
                cand = cost + dist[last][j]
                cur = best.get((nmask, j))
                if cur is None or cand < cur[0]:
                    best[(nmask, j)] = (cand, last)
    end_cost, end_last = math.inf, -1
    for j in range(n):
        entry = best.get((full, j))
        if entry is not None and entry[0] < end_cost:
            end_cost, end_last = entry[0], j
    order: list[int] = []
    mask, last = full, end_last
    while last != -1:
        order.append(last)
        _, prev = best[(mask, last)]
        mask &= ~(1 << last)
        last = prev
    order.reverse()
    return end_cost, tuple(order)


def _nearest_neighbour_two_opt(
    dist: list[list[float]], start_row: list[float], n: int
) -> tuple[float, tuple[int, ...]]:
    # greedy construction
    unvisited = set(range(n))
    order: list[int] = []
    cur_row = start_row
    while unvisited:
        j = min(unvisited, key=lambda k: (cur_row[k], k))
        order.append(j)
        unvisited.discard(j)
        cur_row = dist[j]

    def path_len(seq: list[int]) -> float:
        total = start_row[seq[0]]
        for a, b in zip(seq, seq[1:]):
            total += dist[a][b]
        return total

    improved = True
    while improved:
        improved = False
        for i in range(len(order) - 1):
            for j in range(i + 1, len(order)):
                cand = order[:i] + order[i:j + 1][::-1] + order[j + 1:]
                if path_len(cand) < path_len(order) - 1e-12:
                    order = cand
                    improved = True
    return path_len(order), tuple(order)


def route_extension(
    net: TransitNetwork,
    terminal_id: str,
    cluster: Cluster,
    max_exact: int = EXACT_PATH_CAP,
    allow_heuristic: bool = False,
) -> tuple[tuple[str, ...], float, bool]:
    """Cheapest visit order of a cluster from a terminal.

    Returns (order, length km, certified optimal). Above max_exact members the
    exact program is refused unless the caller accepts the nearest-neighbour +
    2-opt fallback, which is flagged non-optimal.
    """
    members = sorted(cluster.members)
    if not members:
        raise EmptyCluster(f"cluster {cluster.id!r} has no members")
    n = len(members)
    exact = n <= max_exact
    if not exact and not allow_heuristic:
        raise ClusterTooLarge(
            f"cluster {cluster.id!r} has {n} members (> {max_exact}); raise the cap "
            "or pass allow_heuristic=True to accept a non-optimal route"
        )
    start_row = [road_distance_km(net, terminal_id, m) for m in members]
    dist = [[road_distance_km(net, a, b) for b in members] for a in members]
    solver = _shortest_open_path if exact else _nearest_neighbour_two_opt
    length, idx_order = solver(dist, start_row, n)
    return tuple(members[i] for i in idx_order), length, exact


def enumerate_candidates(
    net: TransitNetwork,
    regular_lines: Iterable[Line],
    clusters: Iterable[Cluster],
    max_exact: int = EXACT_PATH_CAP,
    allow_heuristic: bool = False,
) -> tuple[CandidateExtension, ...]:
    """Every (line, terminal, cluster) routing, deterministically ordered."""
    out = []
    lines = sorted(regular_lines, key=lambda l: l.id)
    clusters = sorted(clusters, key=lambda k: k.id)
    for line, terminal, cluster in itertools.product(lines, ("a", "b"), clusters):
        order, length, optimal = route_extension(
            net, line.terminal(terminal), cluster, max_exact, allow_heuristic
        )
        out.append(
            CandidateExtension(
                line_id=line.id,
                terminal=terminal,
                cluster_id=cluster.id,
                order=order,
                length_km=length,
                certified_optimal=optimal,
            )
        )
    return tuple(out)


def extendable_lines(net: TransitNetwork) -> tuple[Line, ...]:
    """Active regular bus lines, the only ones stage 2 may extend."""
    return tuple(
        l for l in net.lines
        if l.kind is LineKind.REGULAR and l.mode is Mode.BUS and l.active
    )
