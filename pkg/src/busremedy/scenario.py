"""Scenario file loading: one YAML document plus an amenity point CSV.

Schema (coordinates in the file are km; everything internal is meters):

    name: suburb                 # required, used in file names
    bounds_km: [15.0, 15.0]      # required, study-area width and height
    amenities: amenities.csv     # required, path relative to the YAML file
    nodes:                       # required
      - {id: s1, kind: rail_station, x_km: 1.2, y_km: 7.5}
      - {id: p1, kind: bus_stop,     x_km: 1.4, y_km: 8.1}
    lines:                       # required
      - {id: r1, mode: rer, stops: [s1, s2], fleet: 16}
      - {id: b1, mode: bus, stops: [p1, p2], fleet: 4,
         speed_kmh: 23.5, dwell_min: 0.5}        # per-line overrides optional
    legs_min:                    # optional explicit inter-stop times
      - [r1, s1, s2, 2.5]
    road_km:                     # optional sparse road distances
      - [p1, p2, 1.4]
    tile_len_km: 1.0             # optional, defaults below
    walking_speed_kmh: 3.5
    walk_radius_km: 1.5
    dmax_m: 500.0
    cap_per_bus: 120.0
    weight_f2: 1.0
    demand: {shape: 5.0, scale: 1.0, adjustment: 1.0, seed: 42}
    clustering: {eps_km: 2.0, min_samples: 1}
    disrupt_line: r1             # optional default disruption target

Every optional key is pre-filled with the documented default, so a minimal
scenario is geometry + lines + amenities. The amenity CSV has a header row
`x_km,y_km` and one amenity point per record.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .network import (
    MODE_DWELL_MIN,
    MODE_SPEED_KMH,
    Line,
    Mode,
    Node,
    NodeKind,
    TransitNetwork,
)
from .tessellation import count_opportunities, tessellate

_KINDS = {"rail_station": NodeKind.RAIL_STATION, "bus_stop": NodeKind.BUS_STOP}


@dataclass(frozen=True)
class DemandParams:
    shape: float = 5.0
    scale: float = 1.0
    adjustment: float = 1.0
    seed: int = 42


@dataclass(frozen=True)
class ClusteringParams:
    eps_km: float = 2.0
    min_samples: int = 1


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario: the intact network plus every tunable parameter."""

    name: str
    network: TransitNetwork
    walking_speed_kmh: float = 3.5
    walk_radius_km: float = 1.5
    dmax_m: float = 500.0
    cap_per_bus: float = 120.0
    weight_f2: float = 1.0
    demand: DemandParams = field(default_factory=DemandParams)
    clustering: ClusteringParams = field(default_factory=ClusteringParams)
    disrupt_line: str | None = None
    dropped_amenities: int = 0


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return doc[key]


def load_amenities(path: Path) -> list[tuple[float, float]]:
    """Amenity coordinates in meters from a `x_km,y_km` CSV."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["x_km", "y_km"]:
                raise ConfigError(f"{path}: expected header 'x_km,y_km'")
            points = []
            for i, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    points.append((float(row[0]) * 1000.0, float(row[1]) * 1000.0))
                except (ValueError, IndexError) as exc:
                    raise ConfigError(f"{path}:{i}: bad amenity row {row!r}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read amenity file {path}: {exc}") from exc
    return points


def _parse_mode(raw: str, where: str) -> Mode:
    try:
        return Mode(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: unknown mode {raw!r}") from exc


def build_network(
    grid,
    nodes: list[Node],
    lines: list[Line],
    road_km: dict[tuple[str, str], float] | None = None,
    legs_min: dict[tuple[str, str, str], float] | None = None,
    tag: str = "original",
) -> TransitNetwork:
    """Assemble a network: add one centroid node per tile, derive missing legs."""
    road_km = dict(road_km or {})
    legs_min = dict(legs_min or {})
    seen_ids = {n.id for n in nodes}
    full_nodes = list(nodes)
    for tile in grid.tiles:
        cx, cy = tile.x_m, tile.y_m
        cid = f"c{tile.id}"
        if cid in seen_ids:
            raise ConfigError(f"node id {cid!r} collides with a tile centroid")
        full_nodes.append(Node(id=cid, kind=NodeKind.CENTROID, x_m=cx, y_m=cy))

    node_by_id = {n.id: n for n in full_nodes}
    full_legs: dict[tuple[str, str, str], float] = {}
    for line in lines:
        for a, b in zip(line.stops, line.stops[1:]):
            if (line.id, a, b) in legs_min:
                full_legs[(line.id, a, b)] = legs_min[(line.id, a, b)]
            elif (line.id, b, a) in legs_min:
                full_legs[(line.id, a, b)] = legs_min[(line.id, b, a)]
            else:
                key = (a, b) if a <= b else (b, a)
                km = road_km.get(key)
                if km is None:
                    na, nb = node_by_id[a], node_by_id[b]
                    km = math.hypot(na.x_m - nb.x_m, na.y_m - nb.y_m) / 1000.0
                full_legs[(line.id, a, b)] = km / line.speed_kmh * 60.0

    return TransitNetwork(
        grid=grid,
        nodes=tuple(sorted(full_nodes, key=lambda n: n.id)),
        lines=tuple(sorted(lines, key=lambda l: l.id)),
        legs_min=full_legs,
        road_km=road_km,
        tag=tag,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    name = str(_require(doc, "name", str(path)))
    bounds = _require(doc, "bounds_km", str(path))
    if not (isinstance(bounds, (list, tuple)) and len(bounds) == 2):
        raise ConfigError(f"{path}: bounds_km must be [width_km, height_km]")
    width_m, height_m = float(bounds[0]) * 1000.0, float(bounds[1]) * 1000.0
    tile_len_km = float(doc.get("tile_len_km", 1.0))
    grid = tessellate((0.0, 0.0, width_m, height_m), tile_len_km)

    amen_path = Path(_require(doc, "amenities", str(path)))
    if not amen_path.is_absolute():
        amen_path = path.parent / amen_path
    points = load_amenities(amen_path)
    grid, dropped = count_opportunities(grid, points)

    nodes: list[Node] = []
    seen_ids: set[str] = set()
    for i, entry in enumerate(_require(doc, "nodes", str(path))):
        where = f"{path}: nodes[{i}]"
        nid = str(_require(entry, "id", where))
        if nid in seen_ids:
            raise ConfigError(f"{where}: duplicate node id {nid!r}")
        seen_ids.add(nid)
        kind_raw = str(_require(entry, "kind", where))
        if kind_raw not in _KINDS:
            raise ConfigError(f"{where}: kind must be one of {sorted(_KINDS)}")
        nodes.append(
            Node(
                id=nid,
                kind=_KINDS[kind_raw],
                x_m=float(_require(entry, "x_km", where)) * 1000.0,
                y_m=float(_require(entry, "y_km", where)) * 1000.0,
            )
        )

    road_km: dict[tuple[str, str], float] = {}
    for i, row in enumerate(doc.get("road_km", [])):
        where = f"{path}: road_km[{i}]"
        if len(row) != 3:
            raise ConfigError(f"{where}: expected [node_a, node_b, km]")
        a, b = sorted((str(row[0]), str(row[1])))
        road_km[(a, b)] = float(row[2])

    legs: dict[tuple[str, str, str], float] = {}
    for i, row in enumerate(doc.get("legs_min", [])):
        where = f"{path}: legs_min[{i}]"
        if len(row) != 4:
            raise ConfigError(f"{where}: expected [line, stop_a, stop_b, minutes]")
        legs[(str(row[0]), str(row[1]), str(row[2]))] = float(row[3])

    node_ids = {n.id for n in nodes}
    lines: list[Line] = []
    for i, entry in enumerate(_require(doc, "lines", str(path))):
        where = f"{path}: lines[{i}]"
        lid = str(_require(entry, "id", where))
        mode = _parse_mode(str(_require(entry, "mode", where)), where)
        stops = tuple(str(s) for s in _require(entry, "stops", where))
        missing = [s for s in stops if s not in node_ids]
        if missing:
            raise ConfigError(f"{where}: unknown stops {missing}")
        try:
            lines.append(
                Line(
                    id=lid,
                    mode=mode,
                    stops=stops,
                    fleet=int(_require(entry, "fleet", where)),
                    speed_kmh=float(entry.get("speed_kmh", MODE_SPEED_KMH[mode])),
                    dwell_min=float(entry.get("dwell_min", MODE_DWELL_MIN[mode])),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if len({l.id for l in lines}) != len(lines):
        raise ConfigError(f"{path}: duplicate line ids")

    network = build_network(grid, nodes, lines, road_km, legs)

    demand_doc = doc.get("demand", {})
    clustering_doc = doc.get("clustering", {})
    disrupt_line = doc.get("disrupt_line")
    if disrupt_line is not None and disrupt_line not in {l.id for l in lines}:
        raise ConfigError(f"{path}: disrupt_line {disrupt_line!r} is not a line id")
    return Scenario(
        name=name,
        network=network,
        walking_speed_kmh=float(doc.get("walking_speed_kmh", 3.5)),
        walk_radius_km=float(doc.get("walk_radius_km", 1.5)),
        dmax_m=float(doc.get("dmax_m", 500.0)),
        cap_per_bus=float(doc.get("cap_per_bus", 120.0)),
        weight_f2=float(doc.get("weight_f2", 1.0)),
        demand=DemandParams(
            shape=float(demand_doc.get("shape", 5.0)),
            scale=float(demand_doc.get("scale", 1.0)),
            adjustment=float(demand_doc.get("adjustment", 1.0)),
            seed=int(demand_doc.get("seed", 42)),
        ),
        clustering=ClusteringParams(
            eps_km=float(clustering_doc.get("eps_km", 2.0)),
            min_samples=int(clustering_doc.get("min_samples", 1)),
        ),
        disrupt_line=str(disrupt_line) if disrupt_line is not None else None,
        dropped_amenities=dropped,
    )
