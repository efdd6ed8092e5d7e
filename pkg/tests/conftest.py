"""Shared builders for the test suites.

Unit tests run on hand-sized networks whose travel times can be checked by
hand; the bundled suburb scenario is loaded once per session for the heavier
end-to-end suites.
"""

from __future__ import annotations

import pytest

from busremedy.network import MODE_DWELL_MIN, MODE_SPEED_KMH, Line, Mode, Node, NodeKind
from busremedy.scenario import build_network
from busremedy.tessellation import count_opportunities, tessellate


def grid_km(w_km: float, h_km: float, opportunity_points=()):
    """Unit-tile grid over (0,0)-(w,h) km with opportunities counted from points."""
    grid = tessellate((0.0, 0.0, w_km * 1000.0, h_km * 1000.0), 1.0)
    if opportunity_points:
        grid, _ = count_opportunities(
            grid, [(x * 1000.0, y * 1000.0) for x, y in opportunity_points]
        )
    return grid


def stop(nid: str, x_km: float, y_km: float) -> Node:
    return Node(id=nid, kind=NodeKind.BUS_STOP, x_m=x_km * 1000.0, y_m=y_km * 1000.0)


def station(nid: str, x_km: float, y_km: float) -> Node:
    return Node(
        id=nid, kind=NodeKind.RAIL_STATION, x_m=x_km * 1000.0, y_m=y_km * 1000.0
    )


def bus_line(lid: str, stops: tuple[str, ...], fleet: int, **kw) -> Line:
    return Line(
        id=lid,
        mode=Mode.BUS,
        stops=stops,
        fleet=fleet,
        speed_kmh=kw.pop("speed_kmh", MODE_SPEED_KMH[Mode.BUS]),
        dwell_min=kw.pop("dwell_min", MODE_DWELL_MIN[Mode.BUS]),
        **kw,
    )


def rail_line(lid: str, stops: tuple[str, ...], fleet: int, mode=Mode.RER, **kw) -> Line:
    return Line(
        id=lid,
        mode=mode,
        stops=stops,
        fleet=fleet,
        speed_kmh=kw.pop("speed_kmh", MODE_SPEED_KMH[mode]),
        dwell_min=kw.pop("dwell_min", MODE_DWELL_MIN[mode]),
        **kw,
    )


def net_of(grid, nodes, lines, **kw):
    return build_network(grid, list(nodes), list(lines), **kw)


@pytest.fixture(scope="session")
def suburb_scenario():
    from busremedy.fixtures import load_suburb

    return load_suburb()
