"""Integer-model assembly, text interchange, evaluation, and tiny solves."""

from __future__ import annotations

import dataclasses

import pytest

from busremedy.disruption import disrupt, gen_demand
from busremedy.errors import EmptySets, TooLarge
from busremedy.ip_model import (
    build_model,
    evaluate_assignment,
    model_to_text,
    objective_value,
    parse_model_text,
    solve_tiny,
    tags_ok,
    zero_assignment,
)

from conftest import bus_line, grid_km, net_of, rail_line, station, stop


def _tiny_disrupted(n_stations=2, with_stop=True):
    grid = grid_km(6.0, 2.0, opportunity_points=[(5.5, 1.5)] * 3)
    nodes = [station(f"s{i+1}", 0.5 + 2.0 * i, 0.5) for i in range(n_stations)]
    stops = [stop("p1", 0.7, 0.8)] if with_stop else []
    lines = [
        rail_line("r1", tuple(f"s{i+1}" for i in range(n_stations)), 8),
        bus_line("l1", ("p1", "m1"), 2) if with_stop else bus_line("l1", ("m1", "m2"), 2),
    ]
    extra = [stop("m1", 4.5, 1.5)] + ([] if with_stop else [stop("m2", 5.0, 1.5)])
    net = net_of(grid, nodes + stops + extra, lines)
    return disrupt(net, "r1")


def test_model_requires_stations_and_lines():
    grid = grid_km(2.0, 1.0)
    net = net_of(grid, [stop("a", 0.5, 0.5), stop("b", 1.5, 0.5)],
                 [bus_line("l1", ("a", "b"), 1)])
    with pytest.raises(EmptySets):
        build_model(net, {})  # nothing disrupted


def test_single_station_single_node_forces_assignment():
    cut = _tiny_disrupted(n_stations=2)
    one = dataclasses.replace(cut, disrupted_stations=("s1",))
    model = build_model(one, {"s1": 40.0}, candidate_nodes=["s1"])
    z_name = "z_s1_s1"

    assignment = zero_assignment(model)
    bad = evaluate_assignment(model, assignment)
    assert any(name == "station_one_node__s1" for name, *_ in bad)

    solved, _ = solve_tiny(model)
    assert solved[z_name] == 1.0
    assert not evaluate_assignment(model, solved)


def test_linearized_product_is_exact_on_all_binary_corners():
    cut = _tiny_disrupted()
    model = build_model(cut, {"s1": 10.0, "s2": 10.0})
    meta = model.meta
    d, n, s = meta["stations"][0], meta["nodes"][0], meta["slots"][0]
    names = {
        "z": meta["vars"]["z"][(d, n)],
        "w": meta["vars"]["w"][(n, s)],
        "v": meta["vars"]["v"][(d, n, s)],
    }
    rows = [
        c for c in model.constraints
        if c.tag.startswith("capacity_product")
        and all(any(nm == t[1] for t in c.terms) for nm in [names["v"]])
        and {t[1] for t in c.terms} <= set(names.values())
    ]
    assert len(rows) == 3

    def feasible(z, w, v) -> bool:
        values = {names["z"]: z, names["w"]: w, names["v"]: v}
        for con in rows:
            lhs = sum(c * values[name] for c, name in con.terms)
            if con.sense == "<=" and lhs > con.rhs + 1e-9:
                return False
        return True

    for z in (0.0, 1.0):
        for w in (0.0, 1.0):
            assert feasible(z, w, z * w)
            assert not feasible(z, w, 1.0 - z * w)


def test_model_text_round_trips():
    cut = _tiny_disrupted()
    model = build_model(cut, {"s1": 30.0, "s2": 10.0}, max_added_buses=2)
    text = model_to_text(model)
    doc = parse_model_text(text)
    names = {v.name for v in model.variables}
    assert doc["generals"] | doc["binaries"] == names
    assert len(doc["bounds"]) == len(model.variables)
    assert len(doc["constraints"]) == len(model.constraints)
    assert len(doc["objective"]) == len(model.objective)
    assert {term[1] for term in doc["objective"]} <= names
    # senses and right-hand sides survive the trip
    for con in model.constraints:
        terms, sense, rhs = doc["constraints"][con.name]
        assert sense == con.sense and rhs == con.rhs
        assert terms == con.terms


def test_model_rebuild_is_byte_identical():
    cut = _tiny_disrupted()
    demand = gen_demand(cut.disrupted_stations, seed=42, adjustment=5.0)
    a = model_to_text(build_model(cut, demand, max_added_buses=1))
    b = model_to_text(build_model(cut, demand, max_added_buses=1))
    assert a == b


def test_objective_prefers_near_assignments():
    cut = _tiny_disrupted()
    model = build_model(cut, {"s1": 50.0, "s2": 20.0}, max_added_buses=1)
    solved, value = solve_tiny(model)
    assert not evaluate_assignment(model, solved)
    assert all(tags_ok(model, solved).values())
    assert value == pytest.approx(objective_value(model, solved), abs=1e-9)
    # every station is assigned exactly one node
    for d in model.meta["stations"]:
        picked = [
            n for n in model.meta["nodes"]
            if solved[model.meta["vars"]["z"][(d, n)]] == 1.0
        ]
        assert len(picked) == 1


def test_solve_tiny_refuses_large_instances():
    cut = _tiny_disrupted()
    model = build_model(cut, {"s1": 10.0, "s2": 10.0})
    with pytest.raises(TooLarge):
        solve_tiny(model, enumeration_cap=1)
