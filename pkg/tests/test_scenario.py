"""Config loading, amenity parsing, and network assembly from scenario files."""

from __future__ import annotations

import pytest

from busremedy.errors import ConfigError
from busremedy.network import Mode, NodeKind
from busremedy.scenario import build_network, load_amenities, load_scenario

from conftest import bus_line, grid_km, stop


def test_bundled_suburb_parses(suburb_scenario):
    sc = suburb_scenario
    assert sc.name == "suburb"
    assert len(sc.network.grid.tiles) == 225
    assert len(sc.network.lines) == 9
    rail = sc.network.line("r1")
    assert rail.mode == Mode.RER and rail.fleet == 16
    assert sc.disrupt_line == "r1"
    assert sc.weight_f2 == 20.0
    assert sc.demand.adjustment == 42.0 and sc.demand.seed == 42
    assert sc.dropped_amenities == 0
    # one synthetic centroid node per tile joins the scenario's own nodes
    assert sc.network.node("c0").kind == NodeKind.CENTROID
    centroids = [n for n in sc.network.nodes if n.kind == NodeKind.CENTROID]
    assert len(centroids) == 225


def test_amenity_loader_validates_header(tmp_path):
    good = tmp_path / "a.csv"
    good.write_text("x_km,y_km\n1.0,2.0\n0.25,0.75\n")
    assert load_amenities(good) == [(1000.0, 2000.0), (250.0, 750.0)]

    bad = tmp_path / "b.csv"
    bad.write_text("lon,lat\n1,2\n")
    with pytest.raises(ConfigError):
        load_amenities(bad)

    junk = tmp_path / "c.csv"
    junk.write_text("x_km,y_km\n1.0,north\n")
    with pytest.raises(ConfigError):
        load_amenities(junk)


def _write_scenario(tmp_path, body: str):
    (tmp_path / "amen.csv").write_text("x_km,y_km\n0.5,0.5\n")
    path = tmp_path / "scenario.yaml"
    path.write_text(body)
    return path


_MINIMAL = """
name: mini
bounds_km: [2.0, 1.0]
amenities: amen.csv
nodes:
  - {id: a, kind: bus_stop, x_km: 0.5, y_km: 0.5}
  - {id: b, kind: bus_stop, x_km: 1.5, y_km: 0.5}
lines:
  - {id: l1, mode: bus, stops: [a, b], fleet: 2}
"""


def test_minimal_scenario_defaults(tmp_path):
    sc = load_scenario(_write_scenario(tmp_path, _MINIMAL))
    assert sc.name == "mini"
    assert sc.walk_radius_km == 1.5
    assert sc.dmax_m == 500.0
    assert sc.cap_per_bus == 120.0
    assert sc.weight_f2 == 1.0
    assert sc.disrupt_line is None
    assert len(sc.network.grid.tiles) == 2
    assert sc.network.grid.tiles[0].opportunities == 1


def test_missing_required_key_rejected(tmp_path):
    body = _MINIMAL.replace("bounds_km: [2.0, 1.0]\n", "")
    with pytest.raises(ConfigError, match="bounds_km"):
        load_scenario(_write_scenario(tmp_path, body))


def test_unknown_stop_rejected(tmp_path):
    body = _MINIMAL.replace("stops: [a, b]", "stops: [a, ghost]")
    with pytest.raises(ConfigError, match="ghost"):
        load_scenario(_write_scenario(tmp_path, body))


def test_duplicate_line_id_rejected(tmp_path):
    body = _MINIMAL + "  - {id: l1, mode: bus, stops: [b, a], fleet: 1}\n"
    with pytest.raises(ConfigError, match="duplicate line ids"):
        load_scenario(_write_scenario(tmp_path, body))


def test_disrupt_line_must_exist(tmp_path):
    body = _MINIMAL + "disrupt_line: r9\n"
    with pytest.raises(ConfigError, match="r9"):
        load_scenario(_write_scenario(tmp_path, body))


def test_bad_yaml_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "nope.yaml")
    path = _write_scenario(tmp_path, "nodes: [}{")
    with pytest.raises(ConfigError):
        load_scenario(path)


def test_build_network_rejects_centroid_collision():
    grid = grid_km(2.0, 1.0)
    with pytest.raises(ConfigError, match="centroid"):
        build_network(grid, [stop("c0", 0.5, 0.5), stop("b", 1.5, 0.5)],
                      [bus_line("l1", ("c0", "b"), 1)])
