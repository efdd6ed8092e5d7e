"""Bundled synthetic scenarios.

`write_suburb` deterministically regenerates the packaged 15x15 km suburb
(rail spine of 6 stations, 8 bus lines, three off-spine opportunity masses);
`suburb_scenario_path` locates the packaged copy; `random_scenario` builds
seeded in-memory networks for property suites.

Run `python -m busremedy.fixtures <dir>` to regenerate the data files.

The suburb geometry is arranged so a disruption tells a clear story:

- The rail spine runs east-west at y = 7.5 km; opportunity masses (old town,
  market, campus) sit several km north or south of it, reachable from the
  spine only through bus lines whose terminals approach, but do not touch,
  the stations.
- Each station has an unserved plaza stop within 500 m: those become the
  consolidation nodes, clustering into a west and an east group (gap between
  station groups is 4.8 km, beyond the 2 km clustering radius).
- West spine tiles have no boardable stop within the 1.5 km walking radius
  once the rail stops, so they are the most affected; the east side keeps two
  nearby bus terminals and degrades more gently.
"""

from __future__ import annotations

import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .network import MODE_DWELL_MIN, MODE_SPEED_KMH, Line, Mode, Node, NodeKind
from .scenario import ClusteringParams, DemandParams, Scenario, build_network
from .tessellation import count_opportunities, tessellate

_STATION_X_KM = (1.3, 3.1, 4.9, 10.1, 11.9, 13.7)
_RAIL_Y_KM = 7.5

# one (x_km, y_km) polyline per bus line, fleet first
_BUS_LINES: dict[str, tuple[int, tuple[tuple[float, float], ...]]] = {
    # dense north trunk: campus to old town, the natural home for spare buses
    "bn1": (6, ((4.7, 11.5), (5.5, 11.6), (6.3, 11.7), (7.1, 11.9), (7.9, 11.8),
                (8.7, 11.6), (9.5, 11.4), (10.3, 11.3), (11.1, 11.2), (11.9, 11.1),
                (12.7, 11.0), (13.5, 11.0))),
    # old town down toward the east station group
    "bn2": (8, ((13.0, 11.2), (12.4, 10.9), (12.0, 9.9), (11.7, 8.9))),
    # market up toward the west station group
    "bs1": (9, ((2.5, 3.3), (3.0, 4.2), (3.1, 5.2), (2.9, 6.2))),
    # south trunk through the market
    "bs2": (4, ((1.5, 3.0), (2.5, 3.2), (3.5, 3.3), (4.5, 3.2), (5.5, 3.0),
                (6.5, 3.0), (7.5, 3.0), (8.5, 3.0))),
    # west edge, south of the spine shadow
    "bw1": (3, ((1.0, 1.5), (1.0, 2.5), (1.0, 3.5), (1.0, 4.5))),
    # east edge, old town past the east station group's flank to the south-east block
    "be1": (4, ((13.4, 11.0), (13.5, 10.2), (13.6, 9.4), (13.7, 8.6),
                (14.2, 7.9), (14.4, 6.6), (14.5, 5.5), (14.5, 4.6))),
    # campus feeder to the north-west
    "bc1": (3, ((2.5, 13.5), (3.5, 13.0), (4.5, 12.5), (5.5, 12.2), (6.5, 12.0), (7.5, 11.9))),
    # south-east connector
    "bs3": (3, ((9.5, 3.0), (10.5, 3.2), (11.5, 3.4), (12.5, 3.5), (13.5, 3.5))),
}

# (x_km, y_km, points) per opportunity mass tile
_MASS_TILES = (
    (11.5, 10.5, 900), (12.5, 10.5, 900), (11.5, 11.5, 900), (12.5, 11.5, 900),
    (2.5, 3.5, 800), (3.5, 3.5, 800), (3.5, 2.5, 800),
    (7.5, 12.5, 700), (7.5, 11.5, 700),
)

_DEMAND_ADJUSTMENT = 42.0
_WEIGHT_F2 = 20.0


def suburb_amenity_points() -> list[tuple[float, float]]:
    """One background point per tile plus jittered points in the mass tiles."""
    rng = np.random.default_rng(7)
    points: list[tuple[float, float]] = []
    for iy in range(15):
        for ix in range(15):
            points.append((ix + 0.4, iy + 0.6))
    for cx, cy, count in _MASS_TILES:
        xs = rng.uniform(cx - 0.5, cx + 0.5, size=count)
        ys = rng.uniform(cy - 0.5, cy + 0.5, size=count)
        points.extend(zip(xs.tolist(), ys.tolist()))
    return points


def suburb_yaml() -> str:
    lines = [
        "name: suburb",
        "bounds_km: [15.0, 15.0]",
        "amenities: amenities.csv",
        "disrupt_line: r1",
        f"weight_f2: {_WEIGHT_F2}",
        f"demand: {{adjustment: {_DEMAND_ADJUSTMENT}, seed: 42}}",
        "nodes:",
    ]
    for i, x in enumerate(_STATION_X_KM, start=1):
        lines.append(
            f"  - {{id: s{i}, kind: rail_station, x_km: {x}, y_km: {_RAIL_Y_KM}}}"
        )
    for i, x in enumerate(_STATION_X_KM, start=1):
        y = 7.9 if i <= 3 else 7.1
        lines.append(f"  - {{id: p{i}, kind: bus_stop, x_km: {x}, y_km: {y}}}")
    for lid, (_fleet, pts) in sorted(_BUS_LINES.items()):
        for j, (x, y) in enumerate(pts, start=1):
            lines.append(
                f"  - {{id: {lid}_{j:02d}, kind: bus_stop, x_km: {x}, y_km: {y}}}"
            )
    lines.append("lines:")
    stations = ", ".join(f"s{i}" for i in range(1, 7))
    lines.append(f"  - {{id: r1, mode: rer, stops: [{stations}], fleet: 16}}")
    for lid, (fleet, pts) in sorted(_BUS_LINES.items()):
        stops = ", ".join(f"{lid}_{j:02d}" for j in range(1, len(pts) + 1))
        lines.append(f"  - {{id: {lid}, mode: bus, stops: [{stops}], fleet: {fleet}}}")
    return "\n".join(lines) + "\n"


def write_suburb(out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.yaml").write_text(suburb_yaml(), encoding="ascii")
    rows = ["x_km,y_km"]
    rows.extend(f"{repr(x)},{repr(y)}" for x, y in suburb_amenity_points())
    (out / "amenities.csv").write_text("\n".join(rows) + "\n", encoding="ascii")


def suburb_scenario_path() -> Path:
    return Path(resources.files("busremedy").joinpath("data/suburb/scenario.yaml"))


def load_suburb() -> Scenario:
    from .scenario import load_scenario

    return load_scenario(suburb_scenario_path())


# --- randomized scenarios for the property suites -------------------------------

def random_scenario(seed: int) -> Scenario:
    """A small seeded scenario whose replacement shuttle is provably bounded.

    Guards baked into the generator keep the comparison envelope clean:
    station spacing stays >= 1 km (a shuttle leg at 23.5 km/h then always
    exceeds the rail leg plus its extra dwell), and the rail fleet is sized so
    the rail wait is below the shuttle wait even with 10 extra buses.
    """
    rng = np.random.default_rng(seed)
    nx = int(rng.integers(6, 10))
    ny = int(rng.integers(6, 10))
    grid = tessellate((0.0, 0.0, nx * 1000.0, ny * 1000.0), 1.0)

    n_stations = int(rng.integers(3, 6))
    rail_y = ny / 2.0
    xs = [0.4]
    while len(xs) < n_stations:
        xs.append(xs[-1] + float(rng.uniform(1.0, 2.2)))
    if xs[-1] > nx - 0.4:  # keep the spacing floor, shrink toward it instead
        xs = [0.4 + i * max(1.0, (nx - 0.8) / (n_stations - 1)) for i in range(n_stations)]
        xs = [min(x, nx - 0.4) if i == n_stations - 1 else x for i, x in enumerate(xs)]
        if xs[-1] - xs[-2] < 1.0:
            xs = [0.4 + i * 1.0 for i in range(n_stations)]

    nodes = [
        Node(id=f"s{i+1}", kind=NodeKind.RAIL_STATION, x_m=x * 1000.0, y_m=rail_y * 1000.0)
        for i, x in enumerate(xs)
    ]
    for i, x in enumerate(xs):
        if rng.random() < 0.5:
            dx, dy = rng.uniform(-0.3, 0.3, size=2)
            nodes.append(
                Node(
                    id=f"p{i+1}",
                    kind=NodeKind.BUS_STOP,
                    x_m=(x + float(dx)) * 1000.0,
                    y_m=(rail_y + float(dy)) * 1000.0,
                )
            )

    # rail fleet such that rail wait < shuttle wait even at 10 shuttle buses
    length = xs[-1] - xs[0]
    t_rail = 2.0 * (length / 60.0 * 60.0 + 1.0 * (n_stations - 2))
    t_shuttle = 2.0 * (length / 23.5 * 60.0 + 0.5 * (n_stations - 2))
    rail_fleet = math.ceil(10.0 * t_rail / t_shuttle) + 1

    lines = [
        Line(
            id="r1",
            mode=Mode.RER,
            stops=tuple(f"s{i+1}" for i in range(n_stations)),
            fleet=rail_fleet,
            speed_kmh=MODE_SPEED_KMH[Mode.RER],
            dwell_min=MODE_DWELL_MIN[Mode.RER],
        )
    ]
    n_bus = int(rng.integers(2, 4))
    for b in range(n_bus):
        n_stops = int(rng.integers(3, 6))
        x = float(rng.uniform(0.5, nx - 0.5))
        y = float(rng.uniform(0.5, ny - 0.5))
        pts = []
        for j in range(n_stops):
            pts.append((x, y))
            angle = float(rng.uniform(0, 2 * math.pi))
            x = min(max(x + math.cos(angle), 0.2), nx - 0.2)
            y = min(max(y + math.sin(angle), 0.2), ny - 0.2)
        stop_ids = []
        for j, (px, py) in enumerate(pts):
            sid = f"b{b+1}_{j:02d}"
            nodes.append(Node(id=sid, kind=NodeKind.BUS_STOP, x_m=px * 1000.0, y_m=py * 1000.0))
            stop_ids.append(sid)
        lines.append(
            Line(id=f"b{b+1}", mode=Mode.BUS, stops=tuple(stop_ids),
                 fleet=int(rng.integers(2, 6)),
                 speed_kmh=MODE_SPEED_KMH[Mode.BUS], dwell_min=MODE_DWELL_MIN[Mode.BUS])
        )

    n_points = int(rng.integers(50, 201))
    pts_m = [
        (float(px), float(py))
        for px, py in zip(
            rng.uniform(0, nx * 1000.0, size=n_points),
            rng.uniform(0, ny * 1000.0, size=n_points),
        )
    ]
    grid, _ = count_opportunities(grid, pts_m)

    network = build_network(grid, nodes, lines)
    return Scenario(
        name=f"random{seed}",
        network=network,
        demand=DemandParams(adjustment=4.0, seed=seed),
        clustering=ClusteringParams(),
        disrupt_line="r1",
    )


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "src/busremedy/data/suburb"
    write_suburb(target)
    print(f"wrote suburb fixture into {target}")
