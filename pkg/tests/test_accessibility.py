"""Gravity scores: per-centroid sums, exclusions, line and pairing values."""

from __future__ import annotations

import pytest

from busremedy.accessibility import (
    AccessibilityField,
    acc_centroid,
    acc_cluster,
    acc_line,
    acc_node,
    acc_overall,
    acc_pairing,
    compute_field,
    gravity_sum,
)
from busremedy.errors import NonPositiveTime

from conftest import bus_line, grid_km, net_of, stop
from oracles import gravity_row, journey_times


def test_sixty_opportunities_at_thirty_minutes():
    grid = grid_km(2.0, 1.0, opportunity_points=[(1.5, 0.5)] * 60)
    assert acc_centroid(0, {0: 1.0, 1: 30.0}, grid) == 2.0


def test_own_tile_excluded_even_when_rich():
    grid = grid_km(2.0, 1.0, opportunity_points=[(0.5, 0.5)] * 100 + [(1.5, 0.5)] * 10)
    # the hundred local opportunities do not count toward tile 0's own score
    assert acc_centroid(0, {1: 5.0}, grid) == 2.0


def test_zero_opportunity_tiles_contribute_nothing():
    grid = grid_km(3.0, 1.0, opportunity_points=[(2.5, 0.5)] * 8)
    assert acc_centroid(0, {1: 1.0, 2: 4.0}, grid) == 2.0


def test_nonpositive_time_to_an_opportunity_tile_raises():
    grid = grid_km(2.0, 1.0, opportunity_points=[(1.5, 0.5)])
    with pytest.raises(NonPositiveTime):
        gravity_sum({1: 0.0}, grid, exclude_tile=0)
    with pytest.raises(NonPositiveTime):
        gravity_sum({}, grid, exclude_tile=0)


def test_field_mean_and_total():
    field = AccessibilityField(network_tag="x", values={0: 1.0, 1: 2.0, 2: 6.0})
    assert field.total == 9.0
    assert field.mean == 3.0
    assert acc_overall(field) == 9.0


def test_compute_field_matches_independent_recomputation():
    grid = grid_km(3.0, 2.0, opportunity_points=[(0.5, 1.5)] * 4 + [(2.5, 0.5)] * 7)
    nodes = [stop("A", 0.5, 0.5), stop("B", 2.5, 0.5)]
    net = net_of(grid, nodes, [bus_line("l1", ("A", "B"), 2)])
    field = compute_field(net)
    for tid in field.values:
        times, converged = journey_times(net, f"c{tid}")
        assert converged
        assert field.values[tid] == pytest.approx(
            gravity_row(times, grid, tid), abs=1e-9
        )


def test_node_score_excludes_the_node_tile():
    grid = grid_km(2.0, 1.0, opportunity_points=[(0.5, 0.5)] * 9 + [(1.5, 0.5)] * 3)
    net = net_of(grid, [stop("A", 0.5, 0.5)], [])
    # A's own tile holds 9 opportunities; only the other tile's 3 count
    assert acc_node(net, "A") == pytest.approx(3.0 / (1.0 * 60.0 / 3.5), abs=1e-9)


def test_line_score_averages_unique_stops():
    grid = grid_km(3.0, 1.0, opportunity_points=[(2.5, 0.5)] * 5)
    nodes = [stop("A", 0.5, 0.5), stop("B", 1.5, 0.5)]
    net = net_of(grid, nodes, [bus_line("l1", ("A", "B", "A"), 2)])
    a = acc_node(net, "A")
    b = acc_node(net, "B")
    assert acc_line(net, "l1") == pytest.approx((a + b) / 2.0, abs=1e-12)


def test_cluster_mean_and_pairing_sum():
    values = {"n1": 1.5, "n2": 2.5, "n3": 10.0}
    assert acc_cluster(values, ["n1", "n2"]) == 2.0
    assert acc_pairing(3.0, 4.0) == 7.0
