"""Multimodal public-transport network snapshots.

A snapshot is immutable. Disruption, replacement and remediation each produce a
new snapshot, so "original vs disrupted vs repaired" comparisons are plain value
comparisons. Times are minutes, distances kilometres, coordinates planar metres.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Mapping

from .errors import (
    EmptySuffix,
    MissingDistance,
    MissingEdgeTime,
    UnknownLine,
    UnknownNode,
    UnknownTerminal,
    ZeroFleet,
)
from .tessellation import TileGrid


class Mode(str, Enum):
    BUS = "bus"
    TRAM = "tram"
    METRO = "metro"
    RER = "rer"


class NodeKind(str, Enum):
    CENTROID = "centroid"
    BUS_STOP = "bus_stop"
    RAIL_STATION = "rail_station"


class LineKind(str, Enum):
    REGULAR = "regular"
    EXTENSION_A = "extension_a"
    EXTENSION_B = "extension_b"
    REPLACEMENT = "replacement"


MODE_SPEED_KMH: Mapping[Mode, float] = {
    Mode.BUS: 23.5,
    Mode.TRAM: 35.0,
    Mode.METRO: 35.0,
    Mode.RER: 60.0,
}

MODE_DWELL_MIN: Mapping[Mode, float] = {
    Mode.BUS: 0.5,
    Mode.TRAM: 0.5,
    Mode.METRO: 1.0,
    Mode.RER: 1.0,
}

RAIL_MODES = frozenset({Mode.TRAM, Mode.METRO, Mode.RER})


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    x_m: float
    y_m: float


@dataclass(frozen=True)
class Line:
    id: str
    mode: Mode
    stops: tuple[str, ...]
    fleet: int
    speed_kmh: float
    dwell_min: float
    kind: LineKind = LineKind.REGULAR
    parent: str | None = None
    extension_suffix: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.stops) < 2:
            raise ValueError(f"line {self.id!r} needs at least 2 stops")
        if self.fleet < 0:
            raise ValueError(f"line {self.id!r} has negative fleet")
        if self.speed_kmh <= 0:
            raise ValueError(f"line {self.id!r} has non-positive speed")
        if self.dwell_min < 0:
            raise ValueError(f"line {self.id!r} has negative dwell")

    @property
    def active(self) -> bool:
        return self.fleet > 0

    def terminal(self, which: str) -> str:
        if which == "a":
            return self.stops[0]
        if which == "b":
            return self.stops[-1]
        raise UnknownTerminal(f"terminal must be 'a' or 'b', got {which!r}")


@dataclass(frozen=True)
class TransitNetwork:
    grid: TileGrid
    nodes: tuple[Node, ...]
    lines: tuple[Line, ...]
    # (line id, from stop, to stop) -> minutes, keyed in listed stop order
    legs_min: Mapping[tuple[str, str, str], float]
    # sorted (a, b) node pair -> road km; pairs not listed fall back to Euclidean
    road_km: Mapping[tuple[str, str], float]
    tag: str = "original"
    disrupted_line: str | None = None
    disrupted_stations: tuple[str, ...] = ()

    @cached_property
    def node_by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def line_by_id(self) -> dict[str, Line]:
        return {l.id: l for l in self.lines}

    def node(self, node_id: str) -> Node:
        try:
            return self.node_by_id[node_id]
        except KeyError:
            raise UnknownNode(f"no node {node_id!r} in network {self.tag!r}") from None

    def line(self, line_id: str) -> Line:
        try:
            return self.line_by_id[line_id]
        except KeyError:
            raise UnknownLine(f"no line {line_id!r} in network {self.tag!r}") from None

    @cached_property
    def centroid_nodes(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.kind is NodeKind.CENTROID)

    def active_lines(self) -> tuple[Line, ...]:
        return tuple(l for l in self.lines if l.active)


def euclid_km(net: TransitNetwork, a: str, b: str) -> float:
    na, nb = net.node(a), net.node(b)
    return math.hypot(na.x_m - nb.x_m, na.y_m - nb.y_m) / 1000.0


def road_distance_km(net: TransitNetwork, a: str, b: str) -> float:
    """Road distance between two nodes; Euclidean when the pair is not listed."""
    if a not in net.node_by_id or b not in net.node_by_id:
        missing = a if a not in net.node_by_id else b
        raise MissingDistance(f"no node {missing!r} for distance lookup")
    key = (a, b) if a <= b else (b, a)
    found = net.road_km.get(key)
    return found if found is not None else euclid_km(net, a, b)


def leg_minutes(net: TransitNetwork, line: Line, i: int) -> float:
    """Running time of the i-th consecutive stop pair, either key orientation."""
    a, b = line.stops[i], line.stops[i + 1]
    t = net.legs_min.get((line.id, a, b))
    if t is None:
        t = net.legs_min.get((line.id, b, a))
    if t is None:
        raise MissingEdgeTime(f"line {line.id!r} has no running time for {a!r}->{b!r}")
    return t


def round_trip_time(net: TransitNetwork, line: Line, *, include_terminal_dwell: bool = False) -> float:
    """Out-and-back cycle time: twice the leg times plus twice the dwells.

    Dwells are charged at intermediate stops only unless include_terminal_dwell.
    """
    run = sum(leg_minutes(net, line, i) for i in range(len(line.stops) - 1))
    dwell_stops = len(line.stops) if include_terminal_dwell else len(line.stops) - 2
    return 2.0 * (run + line.dwell_min * dwell_stops)


def headway(net: TransitNetwork, line: Line) -> float:
    """Interval between departures when the fleet is spread over the cycle."""
    if line.fleet == 0:
        raise ZeroFleet(f"line {line.id!r} has no vehicles; headway undefined")
    return round_trip_time(net, line) / line.fleet


def line_length_km(net: TransitNetwork, line: Line) -> float:
    """Length of the full out-and-back circle."""
    one_way = sum(road_distance_km(net, line.stops[i], line.stops[i + 1])
                  for i in range(len(line.stops) - 1))
    return 2.0 * one_way


def apply_extension(parent: Line, terminal: str, suffix: tuple[str, ...], fleet: int) -> Line:
    """New line continuing past the chosen terminal through the suffix nodes.

    Terminal 'a' reverses the parent stop order so the suffix always trails.
    """
    if not suffix:
        raise EmptySuffix(f"extension of {parent.id!r} needs at least one node")
    if terminal == "a":
        stops = tuple(reversed(parent.stops)) + tuple(suffix)
        kind = LineKind.EXTENSION_A
    elif terminal == "b":
        stops = parent.stops + tuple(suffix)
        kind = LineKind.EXTENSION_B
    else:
        raise UnknownTerminal(f"terminal must be 'a' or 'b', got {terminal!r}")
    return Line(
        id=f"{parent.id}.ext{terminal}",
        mode=parent.mode,
        stops=stops,
        fleet=fleet,
        speed_kmh=parent.speed_kmh,
        dwell_min=parent.dwell_min,
        kind=kind,
        parent=parent.id,
        extension_suffix=tuple(suffix),
    )


def legs_for_line(net: TransitNetwork, line: Line) -> dict[tuple[str, str, str], float]:
    """Running times for every consecutive pair of a new line.

    Pairs inherited from the parent keep the parent's value (service is
    symmetric); fresh pairs run at the line's speed over the road distance.
    """
    out: dict[tuple[str, str, str], float] = {}
    parent = line.parent
    for i in range(len(line.stops) - 1):
        a, b = line.stops[i], line.stops[i + 1]
        t = None
        if parent is not None:
            t = net.legs_min.get((parent, a, b))
            if t is None:
                t = net.legs_min.get((parent, b, a))
        if t is None:
            t = road_distance_km(net, a, b) / line.speed_kmh * 60.0
        out[(line.id, a, b)] = t
    return out


def add_line(net: TransitNetwork, line: Line, tag: str | None = None) -> TransitNetwork:
    """Snapshot with one more line; running times derived where not inherited."""
    if line.id in net.line_by_id:
        raise ValueError(f"line id {line.id!r} already present")
    for s in line.stops:
        net.node(s)
    legs = dict(net.legs_min)
    legs.update(legs_for_line(net, line))
    return replace(
        net,
        lines=tuple(sorted(net.lines + (line,), key=lambda l: l.id)),
        legs_min=legs,
        tag=tag if tag is not None else net.tag,
    )


def set_fleets(net: TransitNetwork, fleets: Mapping[str, int], tag: str | None = None) -> TransitNetwork:
    """Snapshot with per-line fleet counts replaced."""
    for lid in fleets:
        net.line(lid)
    lines = tuple(
        replace(l, fleet=int(fleets[l.id])) if l.id in fleets else l for l in net.lines
    )
    return replace(net, lines=lines, tag=tag if tag is not None else net.tag)


# --- canonical serialization ------------------------------------------------

def network_to_dict(net: TransitNetwork) -> dict:
    return {
        "tag": net.tag,
        "grid": {
            "x_min_m": net.grid.x_min_m,
            "y_min_m": net.grid.y_min_m,
            "tile_len_m": net.grid.tile_len_m,
            "nx": net.grid.nx,
            "ny": net.grid.ny,
            "opportunities": list(net.grid.opportunities),
        },
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "x_m": n.x_m, "y_m": n.y_m}
            for n in sorted(net.nodes, key=lambda n: n.id)
        ],
        "lines": [
            {
                "id": l.id,
                "mode": l.mode.value,
                "stops": list(l.stops),
                "fleet": l.fleet,
                "speed_kmh": l.speed_kmh,
                "dwell_min": l.dwell_min,
                "kind": l.kind.value,
                "parent": l.parent,
                "extension_suffix": list(l.extension_suffix),
            }
            for l in sorted(net.lines, key=lambda l: l.id)
        ],
        "legs_min": [
            [lid, a, b, t] for (lid, a, b), t in sorted(net.legs_min.items())
        ],
        "road_km": [[a, b, d] for (a, b), d in sorted(net.road_km.items())],
        "disrupted_line": net.disrupted_line,
        "disrupted_stations": list(net.disrupted_stations),
    }


def network_to_json(net: TransitNetwork) -> str:
    return json.dumps(network_to_dict(net), sort_keys=True, indent=1)


def network_from_dict(doc: dict) -> TransitNetwork:
    g = doc["grid"]
    grid = TileGrid(
        g["x_min_m"], g["y_min_m"], g["tile_len_m"], g["nx"], g["ny"],
        tuple(g["opportunities"]),
    )
    nodes = tuple(
        Node(n["id"], NodeKind(n["kind"]), n["x_m"], n["y_m"]) for n in doc["nodes"]
    )
    lines = tuple(
        Line(
            id=l["id"],
            mode=Mode(l["mode"]),
            stops=tuple(l["stops"]),
            fleet=l["fleet"],
            speed_kmh=l["speed_kmh"],
            dwell_min=l["dwell_min"],
            kind=LineKind(l["kind"]),
            parent=l["parent"],
            extension_suffix=tuple(l["extension_suffix"]),
        )
        for l in doc["lines"]
    )
    legs = {(lid, a, b): t for lid, a, b, t in doc["legs_min"]}
    road = {(a, b): d for a, b, d in doc["road_km"]}
    return TransitNetwork(
        grid=grid,
        nodes=nodes,
        lines=lines,
        legs_min=legs,
        road_km=road,
        tag=doc["tag"],
        disrupted_line=doc["disrupted_line"],
        disrupted_stations=tuple(doc["disrupted_stations"]),
    )


def network_from_json(text: str) -> TransitNetwork:
    return network_from_dict(json.loads(text))
