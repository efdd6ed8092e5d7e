"""Complete integer program for the remediation problem, plus a tiny exact solver.

This is the monolithic formulation the two-stage heuristic approximates: demand
allocation, extension routing (open paths from line terminals with
Miller-Tucker-Zemlin ordering), capacity with a linearised z*w product, fleet
balance per line family, and the added-bus budget, all in one model.

Variable naming scheme (ids sanitised to [A-Za-z0-9_]):

    z_{station}_{node}          station's demand boards at node
    w_{node}_{line}_{terminal}  node is served by that line extension
    y_{line}_{terminal}         extension activated
    x_{line} / x_{line}_{terminal}   buses on a line / on an extension
    n_{line}                    buses added to the line family
    u_{node}_{line}_{terminal}  visit position (u_start_* is the terminal)
    X_{i}_{j}_{line}_{terminal} extension drives i -> j (X_start_j_* leaves the terminal)
    v_{station}_{node}_{line}_{terminal}  product z*w (linearised)

Constraint tags are semantic and one-to-one with the formulation blocks:
node_single_line, station_one_node, station_served_node, station_node_distance,
route_start, route_flow, route_in_degree, route_out_degree, route_order_mtz,
route_order_lower, route_order_upper, route_start_order, capacity,
capacity_product_le_station, capacity_product_le_node, capacity_product_ge,
activation_lower, activation_upper, fleet_balance, fleet_budget.

The default objective is a linear proxy of the two-stage surrogate: maximise
access-weighted bus counts minus the distance-weighted route arcs (a per-bus
length term would be bilinear, so the length penalty is charged once per
activated arc).

solve_tiny enumerates node-to-extension partitions, demand allocations and
visit orders exhaustively, allocates fleets in closed form, verifies the
winner against every constraint row, and returns a certified optimum. It is a
validation oracle for desk-size instances, not a production solver.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import EmptySets, IoFailure, TooLarge
from .network import TransitNetwork, road_distance_km
from .stage1 import extendable_lines

_SAN = re.compile(r"[^A-Za-z0-9]")


def _clean(raw: str) -> str:
    return _SAN.sub("_", raw)


@dataclass(frozen=True)
class IPVariable:
    name: str
    kind: str  # 'binary' | 'integer'
    lower: float
    upper: float


@dataclass(frozen=True)
class IPConstraint:
    name: str
    tag: str
    terms: tuple[tuple[float, str], ...]
    sense: str  # '<=' | '>=' | '='
    rhs: float


@dataclass(frozen=True)
class IPModel:
    variables: tuple[IPVariable, ...]
    constraints: tuple[IPConstraint, ...]
    objective: tuple[tuple[float, str], ...]  # maximised
    meta: dict = field(compare=False)

    def variable_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def constraint_tags(self) -> list[str]:
        return sorted({c.tag for c in self.constraints})


def default_candidate_nodes(
    net: TransitNetwork, stations: Sequence[str], dmax_m: float
) -> list[str]:
    """Stations plus every bus stop within the boarding distance of a station."""
    from .network import NodeKind

    out = set(stations)
    stops = [n.id for n in net.nodes if n.kind is NodeKind.BUS_STOP]
    for s in stations:
        for stop in stops:
            if road_distance_km(net, s, stop) * 1000.0 <= dmax_m:
                out.add(stop)
    return sorted(out)


def build_model(
    net: TransitNetwork,
    demand: Mapping[str, float],
    *,
    dmax_m: float = 500.0,
    cap_per_bus: float = 120.0,
    max_added_buses: int = 0,
    candidate_nodes: Sequence[str] | None = None,
    line_access: Mapping[str, float] | None = None,
    distance_weight: float = 1.0,
    objective_terms: Mapping[str, float] | None = None,
) -> IPModel:
    """Assemble the full model for a disrupted network snapshot."""
    stations = sorted(net.disrupted_stations)
    lines = [l.id for l in extendable_lines(net)]
    if not stations or not lines:
        raise EmptySets("need at least one disrupted station and one extendable line")
    nodes = (
        sorted(candidate_nodes)
        if candidate_nodes is not None
        else default_candidate_nodes(net, stations, dmax_m)
    )
    if not nodes:
        raise EmptySets("no candidate consolidation nodes")
    slots = [(l, t) for l in lines for t in ("a", "b")]
    base_fleet = {l: net.line(l).fleet for l in lines}
    big_m = max_added_buses + sum(base_fleet.values())
    n_count = len(nodes)

    def slot_id(slot: tuple[str, str]) -> str:
        return f"{_clean(slot[0])}_{slot[1]}"

    variables: list[IPVariable] = []
    seen: set[str] = set()

    def add_var(name: str, kind: str, lower: float, upper: float) -> str:
        if name in seen:
            raise ValueError(f"variable name collision: {name!r}")
        seen.add(name)
        variables.append(IPVariable(name, kind, lower, upper))
        return name

    z = {
        (d, n): add_var(f"z_{_clean(d)}_{_clean(n)}", "binary", 0, 1)
        for d in stations
        for n in nodes
    }
    w = {
        (n, s): add_var(f"w_{_clean(n)}_{slot_id(s)}", "binary", 0, 1)
        for n in nodes
        for s in slots
    }
    y = {s: add_var(f"y_{slot_id(s)}", "binary", 0, 1) for s in slots}
    x_line = {l: add_var(f"x_{_clean(l)}", "integer", 0, big_m) for l in lines}
    x_slot = {s: add_var(f"x_{slot_id(s)}", "integer", 0, big_m) for s in slots}
    n_line = {l: add_var(f"n_{_clean(l)}", "integer", 0, max_added_buses) for l in lines}
    u = {
        (n, s): add_var(f"u_{_clean(n)}_{slot_id(s)}", "integer", 0, n_count + 1)
        for n in nodes
        for s in slots
    }
    u_start = {s: add_var(f"u_start_{slot_id(s)}", "integer", 0, 1) for s in slots}
    arcs = {
        (i, j, s): add_var(f"X_{_clean(i)}_{_clean(j)}_{slot_id(s)}", "binary", 0, 1)
        for s in slots
        for i in nodes
        for j in nodes
        if i != j
    }
    start_arcs = {
        (j, s): add_var(f"X_start_{_clean(j)}_{slot_id(s)}", "binary", 0, 1)
        for s in slots
        for j in nodes
    }
    v = {
        (d, n, s): add_var(
            f"v_{_clean(d)}_{_clean(n)}_{slot_id(s)}", "binary", 0, 1
        )
        for d in stations
        for n in nodes
        for s in slots
    }

    constraints: list[IPConstraint] = []

    def add_con(tag: str, qual: str, terms: Iterable[tuple[float, str]], sense: str, rhs: float) -> None:
        terms = tuple((c, v) for c, v in terms if c != 0.0)
        constraints.append(IPConstraint(f"{tag}__{qual}", tag, terms, sense, rhs))

    for n in nodes:
        add_con("node_single_line", _clean(n), [(1.0, w[(n, s)]) for s in slots], "<=", 1.0)
    for d in stations:
        add_con("station_one_node", _clean(d), [(1.0, z[(d, n)]) for n in nodes], "=", 1.0)
    for d in stations:
        for n in nodes:
            add_con(
                "station_served_node", f"{_clean(d)}_{_clean(n)}",
                [(1.0, z[(d, n)])] + [(-1.0, w[(n, s)]) for s in slots], "<=", 0.0,
            )
    dist_m = {
        (d, n): road_distance_km(net, d, n) * 1000.0 for d in stations for n in nodes
    }
    for d in stations:
        for n in nodes:
            add_con(
                "station_node_distance", f"{_clean(d)}_{_clean(n)}",
                [(dist_m[(d, n)], z[(d, n)])], "<=", dmax_m,
            )

    terminal_of = {}
    for s in slots:
        line = net.line(s[0])
        terminal_of[s] = line.terminal(s[1])
    for s in slots:
        sid = slot_id(s)
        add_con(
            "route_start", sid,
            [(1.0, start_arcs[(j, s)]) for j in nodes] + [(-1.0, y[s])], "=", 0.0,
        )
        add_con("route_start_order", sid, [(1.0, u_start[s]), (-1.0, y[s])], "=", 0.0)
        for i in nodes:
            others = [j for j in nodes if j != i]
            add_con(
                "route_flow", f"{_clean(i)}_{sid}",
                [(1.0, arcs[(i, j, s)]) for j in others]
                + [(-1.0, arcs[(j, i, s)]) for j in others]
                + [(-1.0, start_arcs[(i, s)])],
                "<=", 0.0,
            )
            add_con(
                "route_in_degree", f"{_clean(i)}_{sid}",
                [(1.0, arcs[(j, i, s)]) for j in others]
                + [(1.0, start_arcs[(i, s)]), (-1.0, w[(i, s)])],
                "=", 0.0,
            )
            add_con(
                "route_out_degree", f"{_clean(i)}_{sid}",
                [(1.0, arcs[(i, j, s)]) for j in others] + [(-1.0, w[(i, s)])],
                "<=", 0.0,
            )
            add_con(
                "route_order_lower", f"{_clean(i)}_{sid}",
                [(2.0, w[(i, s)]), (-1.0, u[(i, s)])], "<=", 0.0,
            )
            add_con(
                "route_order_upper", f"{_clean(i)}_{sid}",
                [(1.0, u[(i, s)]), (-(n_count + 1.0), w[(i, s)])], "<=", 0.0,
            )
            for j in others:
                add_con(
                    "route_order_mtz", f"{_clean(i)}_{_clean(j)}_{sid}",
                    [
                        (1.0, u[(i, s)]),
                        (-1.0, u[(j, s)]),
                        (n_count + 2.0, arcs[(i, j, s)]),
                        (-(n_count + 1.0), w[(i, s)]),
                    ],
                    "<=", 0.0,
                )

    for s in slots:
        sid = slot_id(s)
        add_con(
            "capacity", sid,
            [(float(demand.get(d, 0.0)), v[(d, n, s)]) for d in stations for n in nodes]
            + [(-cap_per_bus, x_slot[s])],
            "<=", 0.0,
        )
        add_con("activation_lower", sid, [(1.0, y[s]), (-1.0, x_slot[s])], "<=", 0.0)
        add_con(
            "activation_upper", sid,
            [(1.0, x_slot[s]), (-float(big_m), y[s])], "<=", 0.0,
        )
        for d in stations:
            for n in nodes:
                qual = f"{_clean(d)}_{_clean(n)}_{sid}"
                add_con(
                    "capacity_product_le_station", qual,
                    [(1.0, v[(d, n, s)]), (-1.0, z[(d, n)])], "<=", 0.0,
                )
                add_con(
                    "capacity_product_le_node", qual,
                    [(1.0, v[(d, n, s)]), (-1.0, w[(n, s)])], "<=", 0.0,
                )
                add_con(
                    "capacity_product_ge", qual,
                    [(1.0, z[(d, n)]), (1.0, w[(n, s)]), (-1.0, v[(d, n, s)])],
                    "<=", 1.0,
                )

    for l in lines:
        add_con(
            "fleet_balance", _clean(l),
            [
                (1.0, x_line[l]),
                (1.0, x_slot[(l, "a")]),
                (1.0, x_slot[(l, "b")]),
                (-1.0, n_line[l]),
            ],
            "=", float(base_fleet[l]),
        )
    add_con("fleet_budget", "all", [(1.0, n_line[l]) for l in lines], "<=", float(max_added_buses))

    arc_km = {}
    for s in slots:
        for j in nodes:
            arc_km[("start", j, s)] = road_distance_km(net, terminal_of[s], j)
        for i in nodes:
            for j in nodes:
                if i != j:
                    arc_km[(i, j, s)] = road_distance_km(net, i, j)

    if objective_terms is not None:
        objective = tuple(sorted(objective_terms.items()))
        objective = tuple((float(c), name) for name, c in objective)
    else:
        if line_access is None:
            from .accessibility import line_scores as _line_scores

            per_line, _ = _line_scores(net, [net.line(l) for l in lines])
            line_access = per_line
        obj: list[tuple[float, str]] = []
        for l in lines:
            obj.append((float(line_access[l]), x_line[l]))
        for s in slots:
            obj.append((float(line_access[s[0]]), x_slot[s]))
        for s in slots:
            for j in nodes:
                obj.append((-distance_weight * arc_km[("start", j, s)], start_arcs[(j, s)]))
            for i in nodes:
                for j in nodes:
                    if i != j:
                        obj.append((-distance_weight * arc_km[(i, j, s)], arcs[(i, j, s)]))
        objective = tuple(obj)

    meta = {
        "stations": stations,
        "nodes": nodes,
        "lines": lines,
        "slots": slots,
        "base_fleet": base_fleet,
        "demand": {d: float(demand.get(d, 0.0)) for d in stations},
        "dmax_m": dmax_m,
        "cap_per_bus": cap_per_bus,
        "max_added_buses": max_added_buses,
        "big_m": big_m,
        "dist_m": dist_m,
        "arc_km": arc_km,
        "terminal_of": terminal_of,
        "vars": {
            "z": z, "w": w, "y": y, "x_line": x_line, "x_slot": x_slot,
            "n_line": n_line, "u": u, "u_start": u_start,
            "arcs": arcs, "start_arcs": start_arcs, "v": v,
        },
    }
    return IPModel(tuple(variables), tuple(constraints), objective, meta)


# --- text interchange ---------------------------------------------------------

def _num(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _row_text(terms: Sequence[tuple[float, str]]) -> str:
    if not terms:
        return "0"
    parts: list[str] = []
    for i, (coeff, name) in enumerate(terms):
        mag = _num(abs(coeff))
        sign = "-" if coeff < 0 else "+"
        if i == 0:
            parts.append(f"{'-' if coeff < 0 else ''}{mag} {name}")
        else:
            parts.append(f"{sign} {mag} {name}")
    return " ".join(parts)


def model_to_text(model: IPModel) -> str:
    """Render to LP interchange text with a stable variable and row order."""
    lines = ["\\ busremedy integer model", "Maximize", f" obj: {_row_text(model.objective)}"]
    lines.append("Subject To")
    sense_txt = {"<=": "<=", ">=": ">=", "=": "="}
    for con in model.constraints:
        lines.append(
            f" {con.name}: {_row_text(con.terms)} {sense_txt[con.sense]} {_num(con.rhs)}"
        )
    lines.append("Bounds")
    for var in model.variables:
        lines.append(f" {_num(var.lower)} <= {var.name} <= {_num(var.upper)}")
    generals = [v.name for v in model.variables if v.kind == "integer"]
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    if generals:
        lines.append("Generals")
        lines.extend(f" {name}" for name in generals)
    if binaries:
        lines.append("Binaries")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_model(model: IPModel, path) -> None:
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(model_to_text(model))
    except OSError as exc:
        raise IoFailure(f"cannot write model file {path!r}: {exc}") from exc


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:e-?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_model_text(text: str) -> dict:
    """Re-read an LP text written by model_to_text (round-trip checking only)."""
    section = None
    objective: list[tuple[float, str]] = []
    constraints: dict[str, tuple[tuple[tuple[float, str], ...], str, float]] = {}
    bounds: dict[str, tuple[float, float]] = {}
    generals: set[str] = set()
    binaries: set[str] = set()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered in {"maximize", "subject to", "bounds", "generals", "binaries", "end"}:
            section = lowered
            continue
        if section == "maximize":
            body = line.split(":", 1)[1]
            objective.extend(_parse_terms(body))
        elif section == "subject to":
            name, body = (part.strip() for part in line.split(":", 1))
            for sense in ("<=", ">=", "="):
                if f" {sense} " in body:
                    lhs, rhs = body.rsplit(f" {sense} ", 1)
                    constraints[name] = (tuple(_parse_terms(lhs)), sense, float(rhs))
                    break
        elif section == "bounds":
            lo, _, name, _, hi = line.split()
            bounds[name] = (float(lo), float(hi))
        elif section == "generals":
            generals.add(line)
        elif section == "binaries":
            binaries.add(line)
    return {
        "objective": objective,
        "constraints": constraints,
        "bounds": bounds,
        "generals": generals,
        "binaries": binaries,
    }


def _parse_terms(body: str) -> list[tuple[float, str]]:
    out = []
    for sign, coeff, name in _TERM.findall(body):
        value = float(coeff) if coeff else 1.0
        if sign == "-":
            value = -value
        out.append((value, name))
    return out


# --- evaluation and the tiny exact solver -------------------------------------

def evaluate_assignment(
    model: IPModel, assignment: Mapping[str, float], tol: float = 1e-9
) -> list[tuple[str, str, float, str, float]]:
    """Violated rows as (name, tag, lhs, sense, rhs); empty means feasible."""
    bad = []
    for con in model.constraints:
        lhs = sum(c * assignment[name] for c, name in con.terms)
        ok = (
            lhs <= con.rhs + tol
            if con.sense == "<="
            else lhs >= con.rhs - tol
            if con.sense == ">="
            else abs(lhs - con.rhs) <= tol
        )
        if not ok:
            bad.append((con.name, con.tag, lhs, con.sense, con.rhs))
    for var in model.variables:
        val = assignment[var.name]
        if val < var.lower - tol or val > var.upper + tol:
            bad.append((var.name, "bounds", val, "in", var.upper))
    return bad


def tags_ok(model: IPModel, assignment: Mapping[str, float], tol: float = 1e-9) -> dict[str, bool]:
    """Per-tag feasibility of an assignment (bounds reported under 'bounds')."""
    status = {tag: True for tag in model.constraint_tags()}
    status["bounds"] = True
    for name, tag, *_ in evaluate_assignment(model, assignment, tol):
        status[tag] = False
    return status


def objective_value(model: IPModel, assignment: Mapping[str, float]) -> float:
    return sum(c * assignment[name] for c, name in model.objective)


def zero_assignment(model: IPModel) -> dict[str, float]:
    return {v.name: 0.0 for v in model.variables}


def solve_tiny(model: IPModel, enumeration_cap: int = 2_000_000) -> tuple[dict[str, float], float]:
    """Certified optimum of a tiny instance by structured exhaustive search."""
    meta = model.meta
    stations: list[str] = meta["stations"]
    nodes: list[str] = meta["nodes"]
    slots: list[tuple[str, str]] = meta["slots"]
    lines: list[str] = meta["lines"]
    demand: dict[str, float] = meta["demand"]
    base_fleet: dict[str, int] = meta["base_fleet"]
    cap = meta["cap_per_bus"]
    n_max = meta["max_added_buses"]
    vars_ = meta["vars"]

    est = (len(slots) + 1) ** len(nodes) * max(1, len(nodes)) ** len(stations)
    est *= math.factorial(min(len(nodes), 6))
    if est > enumeration_cap or len(nodes) > 8:
        raise TooLarge(
            f"instance enumeration estimate {est} exceeds cap {enumeration_cap}"
        )

    obj = {name: c for c, name in model.objective}

    def coef(name: str) -> float:
        return obj.get(name, 0.0)

    reachable = {
        d: [n for n in nodes if meta["dist_m"][(d, n)] <= meta["dmax_m"] + 1e-9]
        for d in stations
    }

    best_value = -math.inf
    best_assignment: dict[str, float] | None = None

    for partition in itertools.product(range(len(slots) + 1), repeat=len(nodes)):
        slot_nodes: dict[tuple[str, str], list[str]] = {s: [] for s in slots}
        for node, pick in zip(nodes, partition):
            if pick > 0:
                slot_nodes[slots[pick - 1]].append(node)
        served = {n for members in slot_nodes.values() for n in members}

        # best visit order per activated slot under the model objective
        fixed = 0.0
        path_vars: dict[str, float] = {}
        ok = True
        for s in slots:
            members = slot_nodes[s]
            if not members:
                continue
            fixed += coef(vars_["y"][s]) + coef(vars_["u_start"][s])
            for n in members:
                fixed += coef(vars_["w"][(n, s)])
            best_perm_val, best_perm_assign = -math.inf, None
            for perm in itertools.permutations(members):
                val = coef(vars_["start_arcs"][(perm[0], s)])
                assign = {vars_["start_arcs"][(perm[0], s)]: 1.0}
                for pos, n in enumerate(perm):
                    uval = pos + 2.0
                    val += uval * coef(vars_["u"][(n, s)])
                    assign[vars_["u"][(n, s)]] = uval
                for a, b in zip(perm, perm[1:]):
                    val += coef(vars_["arcs"][(a, b, s)])
                    assign[vars_["arcs"][(a, b, s)]] = 1.0
                if val > best_perm_val:
                    best_perm_val, best_perm_assign = val, assign
            if best_perm_assign is None:
                ok = False
                break
            fixed += best_perm_val
            path_vars.update(best_perm_assign)
        if not ok:
            continue

        choice_sets = []
        for d in stations:
            choices = [n for n in reachable[d] if n in served]
            if not choices:
                choice_sets = None
                break
            choice_sets.append(choices)
        if choice_sets is None:
            continue

        node_slot = {n: s for s, members in slot_nodes.items() for n in members}

        for pick in itertools.product(*choice_sets):
            alloc_fixed = fixed
            slot_demand = {s: 0.0 for s in slots}
            for d, n in zip(stations, pick):
                alloc_fixed += coef(vars_["z"][(d, n)])
                s = node_slot[n]
                alloc_fixed += coef(vars_["v"][(d, n, s)])
                slot_demand[s] += demand[d]

            # closed-form fleet split per family, slack to the best coefficient
            fam_min: dict[str, int] = {}
            fam_best: dict[str, tuple[float, str]] = {}
            pins_value = 0.0
            for l in lines:
                pins = 0
                best_c, best_var = (
                    coef(vars_["x_line"][l]) + coef(vars_["n_line"][l]),
                    vars_["x_line"][l],
                )
                for t in ("a", "b"):
                    s = (l, t)
                    if slot_nodes[s]:
                        lb = max(1, math.ceil(slot_demand[s] / cap - 1e-12))
                        pins += lb
                        c = coef(vars_["x_slot"][s]) + coef(vars_["n_line"][l])
                        pins_value += lb * c
                        if c > best_c:
                            best_c, best_var = c, vars_["x_slot"][s]
                fam_min[l] = max(pins, base_fleet[l])
                fam_best[l] = (best_c, best_var)
                pins_value += (fam_min[l] - pins) * best_c
            slack = sum(base_fleet.values()) + n_max - sum(fam_min.values())
            if slack < 0:
                continue
            best_l = None
            best_c_all = 0.0
            for l in lines:
                if fam_best[l][0] > best_c_all:
                    best_c_all, best_l = fam_best[l][0], l
            total = alloc_fixed + pins_value + (slack * best_c_all if best_l else 0.0)
            if total <= best_value:
                continue

            assignment = zero_assignment(model)
            assignment.update(path_vars)
            for s in slots:
                if slot_nodes[s]:
                    assignment[vars_["y"][s]] = 1.0
                    assignment[vars_["u_start"][s]] = 1.0
                    for n in slot_nodes[s]:
                        assignment[vars_["w"][(n, s)]] = 1.0
            for d, n in zip(stations, pick):
                assignment[vars_["z"][(d, n)]] = 1.0
                assignment[vars_["v"][(d, n, node_slot[n])]] = 1.0
            for l in lines:
                family_total = fam_min[l] + (slack if l == best_l else 0)
                placed = 0
                for t in ("a", "b"):
                    s = (l, t)
                    if slot_nodes[s]:
                        lb = max(1, math.ceil(slot_demand[s] / cap - 1e-12))
                        assignment[vars_["x_slot"][s]] = float(lb)
                        placed += lb
                extra = family_total - placed
                assignment[fam_best[l][1]] = assignment.get(fam_best[l][1], 0.0) + extra
                assignment[vars_["n_line"][l]] = float(family_total - base_fleet[l])
            if evaluate_assignment(model, assignment):
                continue
            best_value = total
            best_assignment = assignment

    if best_assignment is None:
        raise TooLarge("no feasible assignment found by enumeration")
    return best_assignment, objective_value(model, best_assignment)


def translate_plan(
    model: IPModel,
    station_to_node: Mapping[str, str],
    cluster_members: Mapping[str, Sequence[str]],
    plan,
) -> dict[str, float]:
    """Express a stage-2 plan in the model's variables."""
    meta = model.meta
    vars_ = meta["vars"]
    assignment = zero_assignment(model)
    slot_of_cluster = {k: (l, t) for (l, t, k) in plan.pairings}
    node_slot: dict[str, tuple[str, str]] = {}
    for k, slot in slot_of_cluster.items():
        for n in cluster_members[k]:
            node_slot[n] = slot
    for d, n in station_to_node.items():
        assignment[vars_["z"][(d, n)]] = 1.0
        if n in node_slot:
            assignment[vars_["v"][(d, n, node_slot[n])]] = 1.0
    for (l, t, k) in plan.pairings:
        s = (l, t)
        assignment[vars_["y"][s]] = 1.0
        assignment[vars_["u_start"][s]] = 1.0
        order = plan.extension_orders[(l, t, k)]
        assignment[vars_["start_arcs"][(order[0], s)]] = 1.0
        for pos, n in enumerate(order):
            assignment[vars_["w"][(n, s)]] = 1.0
            assignment[vars_["u"][(n, s)]] = pos + 2.0
        for a, b in zip(order, order[1:]):
            assignment[vars_["arcs"][(a, b, s)]] = 1.0
        assignment[vars_["x_slot"][s]] = float(plan.extension_fleet[s])
    for l, x in plan.regular_fleet.items():
        assignment[vars_["x_line"][l]] = float(x)
        assignment[vars_["n_line"][l]] = float(plan.added[l])
    return assignment
