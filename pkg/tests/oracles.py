"""Independent reference implementations used to cross-check the library.

Deliberately different algorithms from the package: Floyd-Warshall plus a
boarding-count dynamic program instead of one Dijkstra pass, permutation scans
instead of the subset DP, union-find components instead of DBSCAN, and plain
exhaustive enumeration instead of branch and bound. Values, not code, are
shared with the implementation under test.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from busremedy.network import (
    RAIL_MODES,
    NodeKind,
    TransitNetwork,
    headway,
    leg_minutes,
)
from busremedy.stage2 import AllocationProblem


# --- walking and journeys -------------------------------------------------------

def walk_closure(
    net: TransitNetwork, walk_radius_km: float = 1.5, walking_speed_kmh: float = 3.5
) -> tuple[list[str], np.ndarray]:
    """All-pairs walking minutes via Floyd-Warshall over the walk arcs.

    Arcs join node pairs within the radius plus every centroid pair; chains of
    several walk legs are legal, so the closure can beat the crow-flies pace.
    """
    nodes = sorted(net.nodes, key=lambda n: n.id)
    ids = [n.id for n in nodes]
    coords = np.array([(n.x_m, n.y_m) for n in nodes]) / 1000.0
    cent = np.array([n.kind is NodeKind.CENTROID for n in nodes])
    dist = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
    pace = 60.0 / walking_speed_kmh
    w = np.full_like(dist, np.inf)
    arc = (dist <= walk_radius_km) | (cent[:, None] & cent[None, :])
    w[arc] = dist[arc] * pace
    np.fill_diagonal(w, 0.0)
    n = len(ids)
    for k in range(n):
        w = np.minimum(w, w[:, k : k + 1] + w[k : k + 1, :])
    return ids, w


def _ride_costs(net: TransitNetwork, line) -> list[tuple[int, int, float]]:
    """(board position, alight position, minutes) for every directed stop pair.

    Riding monotonically from position i to j costs the leg times in between
    plus one dwell per intermediate stop; any back-and-forth ride is dominated.
    """
    n = len(line.stops)
    legs = [leg_minutes(net, line, i) for i in range(n - 1)]
    out = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            lo, hi = min(i, j), max(i, j)
            cost = sum(legs[lo:hi]) + line.dwell_min * (hi - lo - 1)
            out.append((i, j, cost))
    return out


def journey_times(
    net: TransitNetwork,
    origin: str,
    walk_radius_km: float = 1.5,
    walking_speed_kmh: float = 3.5,
    max_boardings: int = 3,
) -> tuple[dict[int, float], bool]:
    """Brute-force minimum journey times from a node to every tile centroid.

    T_k holds the best time to each street node using at most k boardings;
    each round tries every (line, board stop, alight stop) on top of T_{k-1}
    and finishes with the walking closure. Returns the tile times at
    max_boardings plus whether one more boarding could still improve anything
    (False means the enumeration provably covers all journeys).
    """
    ids, w = walk_closure(net, walk_radius_km, walking_speed_kmh)
    idx = {nid: i for i, nid in enumerate(ids)}
    closed = set(net.disrupted_stations)

    boards = []  # (street board idx, street alight idx, total ride cost incl wait)
    for line in net.active_lines():
        h2 = headway(net, line) / 2.0
        for i, j, cost in _ride_costs(net, line):
            stop_i = line.stops[i]
            if stop_i in closed and line.mode in RAIL_MODES:
                continue
            boards.append((idx[stop_i], idx[line.stops[j]], h2 + cost))

    t = w[idx[origin]].copy()
    for _ in range(max_boardings):
        nxt = t.copy()
        for si, sj, cost in boards:
            np.minimum(nxt, t[si] + cost + w[sj], out=nxt)
        t = nxt
    extra = t.copy()
    for si, sj, cost in boards:
        np.minimum(extra, t[si] + cost + w[sj], out=extra)
    converged = bool(np.all(extra >= t - 1e-12))

    times: dict[int, float] = {}
    for nid, i in idx.items():
        node = net.node(nid)
        if node.kind is NodeKind.CENTROID:
            times[net.grid.tile_index(node.x_m, node.y_m)] = float(t[i])
    return times, converged


def gravity_row(times: dict[int, float], grid, own_tile: int | None) -> float:
    """Opportunities over minutes, skipping the origin tile and empty tiles."""
    total = 0.0
    for tid, opp in enumerate(grid.opportunities):
        if tid == own_tile or opp == 0:
            continue
        total += opp / times[tid]
    return total


# --- open-path routing ----------------------------------------------------------

def best_open_path_by_scan(
    net: TransitNetwork, start_id: str, members: tuple[str, ...]
) -> tuple[tuple[str, ...], float]:
    """Minimum-length start-anchored path through all members, end free.

    Plain scan over every permutation, accumulating the length left to right.
    """
    from busremedy.network import road_distance_km

    ordered = sorted(members)
    best_len, best_order = math.inf, None
    for perm in itertools.permutations(ordered):
        total = road_distance_km(net, start_id, perm[0])
        for a, b in zip(perm, perm[1:]):
            total += road_distance_km(net, a, b)
        if total < best_len:
            best_len, best_order = total, perm
    return best_order, best_len


# --- clustering -----------------------------------------------------------------

def component_clusters(
    net: TransitNetwork, node_ids: tuple[str, ...], eps_km: float
) -> list[tuple[str, ...]]:
    """Connected components of the eps-neighbourhood graph via union-find.

    At min_samples=1 DBSCAN must produce exactly these groups. Returned sorted
    by each group's lowest member id, members sorted within the group.
    """
    ids = sorted(node_ids)
    parent = {n: n for n in ids}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in itertools.combinations(ids, 2):
        na, nb = net.node(a), net.node(b)
        d_km = math.hypot(na.x_m - nb.x_m, na.y_m - nb.y_m) / 1000.0
        if d_km <= eps_km:
            parent[find(a)] = find(b)
    groups: dict[str, list[str]] = {}
    for n in ids:
        groups.setdefault(find(n), []).append(n)
    return [tuple(sorted(g)) for g in sorted(groups.values(), key=lambda g: g[0])]


# --- fleet allocation -----------------------------------------------------------

def enumerate_allocation(
    problem: AllocationProblem,
    *,
    keep_original_fleet: bool = False,
    regular_floor: int = 0,
    max_pull_per_line: int = 0,
) -> float | None:
    """Best objective over every cluster-to-extension matching and fleet split.

    Regular fleets and activated extension fleets are enumerated outright per
    line family (regular at or above its floor, an activated extension at or
    above the capacity minimum of its cluster, family total no lower than the
    base fleet minus the allowed pull); family choices combine under the shared
    bus budget. Returns None when nothing is feasible.
    """
    lines = sorted(problem.base_fleet)
    clusters = sorted(problem.cluster_demand)
    budget = sum(problem.base_fleet.values()) + problem.max_added_buses
    floors = {
        l: problem.base_fleet[l] if keep_original_fleet else regular_floor
        for l in lines
    }

    options = {}
    for k in clusters:
        opts = [s for s in problem.slots if (s[0], s[1], k) in problem.candidate_by_key]
        if not opts:
            return None
        options[k] = opts

    best: float | None = None
    for pick in itertools.product(*(options[k] for k in clusters)):
        if len(set(pick)) != len(pick):
            continue
        slot_to_cluster = dict(zip(pick, clusters))

        # per family: best value achievable at each family total, by enumeration
        family_tables: list[dict[int, float]] = []
        feasible = True
        for l in lines:
            active = [(l, t) for t in ("a", "b") if (l, t) in slot_to_cluster]
            lbs = [problem.bus_need(slot_to_cluster[s]) for s in active]
            coeffs = [
                problem.net_value((s[0], s[1], slot_to_cluster[s])) for s in active
            ]
            t_min = max(problem.base_fleet[l] - max_pull_per_line, 0)
            by_total: dict[int, float] = {}
            for x_reg in range(floors[l], budget + 1):
                for xs in itertools.product(
                    *(range(lb, budget + 1) for lb in lbs)
                ):
                    tot = x_reg + sum(xs)
                    if tot > budget or tot < t_min:
                        continue
                    val = x_reg * problem.line_scores[l] + sum(
                        x * c for x, c in zip(xs, coeffs)
                    )
                    cur = by_total.get(tot)
                    if cur is None or val > cur:
                        by_total[tot] = val
            if not by_total:
                feasible = False
                break
            family_tables.append(by_total)
        if not feasible:
            continue

        spend: dict[int, float] = {0: 0.0}
        for table in family_tables:
            nxt: dict[int, float] = {}
            for used, val in spend.items():
                for tot, fam_val in table.items():
                    if used + tot > budget:
                        continue
                    key = used + tot
                    cand = val + fam_val
                    if key not in nxt or cand > nxt[key]:
                        nxt[key] = cand
            spend = nxt
            if not spend:
                break
        if not spend:
            continue
        value = max(spend.values())
        if best is None or value > best:
            best = value
    return best
