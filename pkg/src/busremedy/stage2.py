"""Stage 2 of the remediation heuristic: who serves which cluster, with how many buses.

The decision couples a matching (each cluster is served by exactly one line
extension, each extension serves at most one cluster) with an integer fleet
allocation. The objective is an accessibility-weighted bus count minus a
distance-weighted bus count on the extensions.

Fleet accounting works per line family: a line, its two possible extensions,
and the family budget x_line + x_ext_a + x_ext_b = base fleet + added buses.
Added buses are nonnegative by default (a family may shift its own buses onto
its extensions, which still serve every parent stop, but fleets never migrate
across families); `max_pull_per_line` relaxes that. The total of added buses
across families is capped by the scenario budget.

The search is exact: branch and bound over matchings with an admissible upper
bound, plus a closed-form optimal fleet split at every leaf (the objective is
linear, so within a family every discretionary bus belongs on the family's
best coefficient, and the budget slack belongs on the best coefficient
overall). A machine validator re-checks every constraint on the returned plan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .errors import Infeasible
from .network import TransitNetwork, apply_extension, add_line, set_fleets
from .stage1 import CandidateExtension

SlotKey = tuple[str, str]  # (line id, terminal)
PairKey = tuple[str, str, str]  # (line id, terminal, cluster id)


@dataclass(frozen=True)
class AllocationProblem:
    candidates: tuple[CandidateExtension, ...]
    pairing_scores: Mapping[PairKey, float]  # accessibility value of a pairing
    line_scores: Mapping[str, float]  # accessibility value of a regular line
    base_fleet: Mapping[str, int]  # line id -> buses before remediation
    cluster_demand: Mapping[str, float]  # cluster id -> passengers per unit time
    cap_per_bus: float = 120.0
    max_added_buses: int = 0
    distance_weight: float = 1.0

    def __post_init__(self) -> None:
        if self.cap_per_bus <= 0:
            raise ValueError("cap_per_bus must be positive")
        if self.max_added_buses < 0:
            raise ValueError("max_added_buses must be >= 0")
        for cand in self.candidates:
            if cand.key not in self.pairing_scores:
                raise ValueError(f"candidate {cand.key} has no pairing score")
            if cand.line_id not in self.line_scores or cand.line_id not in self.base_fleet:
                raise ValueError(f"candidate line {cand.line_id!r} not scored")

    @cached_property
    def candidate_by_key(self) -> dict[PairKey, CandidateExtension]:
        return {c.key: c for c in self.candidates}

    @cached_property
    def slots(self) -> tuple[SlotKey, ...]:
        return tuple(sorted({(c.line_id, c.terminal) for c in self.candidates}))

    @cached_property
    def big_m(self) -> int:
        return self.max_added_buses + sum(self.base_fleet.values())

    def bus_need(self, cluster_id: str) -> int:
        """Minimum buses on the extension serving a cluster."""
        q = self.cluster_demand[cluster_id]
        return max(1, math.ceil(q / self.cap_per_bus - 1e-12))

    def net_value(self, key: PairKey) -> float:
        """Per-bus objective coefficient of an activated pairing."""
        cand = self.candidate_by_key[key]
        return self.pairing_scores[key] - self.distance_weight * cand.length_km


@dataclass(frozen=True)
class RemediationPlan:
    pairings: tuple[PairKey, ...]
    regular_fleet: Mapping[str, int]  # line id -> buses kept on the base route
    extension_fleet: Mapping[SlotKey, int]  # activated extensions only
    added: Mapping[str, int]  # line id -> change in the family total
    objective_access: float
    objective_distance: float
    objective: float
    extension_orders: Mapping[PairKey, tuple[str, ...]]
    max_added_buses: int
    distance_weight: float
    certified_optimal: bool = True

    def slot_cluster(self) -> dict[SlotKey, str]:
        return {(l, t): k for (l, t, k) in self.pairings}


def access_score(
    problem: AllocationProblem,
    regular_fleet: Mapping[str, int],
    extension_fleet: Mapping[SlotKey, int],
    pairings: Sequence[PairKey],
) -> float:
    """Accessibility-weighted bus count over regular lines and activated pairings."""
    total = sum(problem.line_scores[l] * x for l, x in regular_fleet.items())
    for (l, t, k) in pairings:
        total += problem.pairing_scores[(l, t, k)] * extension_fleet[(l, t)]
    return total


def distance_score(
    problem: AllocationProblem,
    extension_fleet: Mapping[SlotKey, int],
    pairings: Sequence[PairKey],
) -> float:
    """Distance-weighted bus count over activated pairings (unweighted km)."""
    total = 0.0
    for (l, t, k) in pairings:
        cand = problem.candidate_by_key[(l, t, k)]
        total += cand.length_km * extension_fleet[(l, t)]
    return total


@dataclass
class _FamilyEval:
    floor: int
    pins: int  # floor + sum of serve minima
    f_min: int  # smallest legal family total
    best_coeff: float
    best_var: tuple[str, SlotKey | None]  # ('reg', None) or ('ext', slot)
    lb: dict[SlotKey, int] = field(default_factory=dict)
    coeff: dict[SlotKey, float] = field(default_factory=dict)


def _evaluate_matching(
    problem: AllocationProblem,
    chosen: Mapping[str, SlotKey],
    floors: Mapping[str, int],
    max_pull: int,
) -> tuple[float, dict[str, int], dict[SlotKey, int]] | None:
    """Optimal fleets for a full cluster->slot matching, or None when infeasible."""
    lines = sorted(problem.base_fleet)
    slot_to_cluster: dict[SlotKey, str] = {s: k for k, s in chosen.items()}
    fams: dict[str, _FamilyEval] = {}
    total_min = 0
    for l in lines:
        floor = floors[l]
        fam = _FamilyEval(
            floor=floor, pins=floor, f_min=0,
            best_coeff=problem.line_scores[l], best_var=("reg", None),
        )
        for t in ("a", "b"):
            slot = (l, t)
            k = slot_to_cluster.get(slot)
            if k is None:
                continue
            lb = problem.bus_need(k)
            c = problem.net_value((l, t, k))
            fam.lb[slot] = lb
            fam.coeff[slot] = c
            fam.pins += lb
            if c > fam.best_coeff:
                fam.best_coeff = c
                fam.best_var = ("ext", slot)
        fam.f_min = max(fam.pins, problem.base_fleet[l] - max_pull, 0)
        fams[l] = fam
        total_min += fam.f_min
    budget = sum(problem.base_fleet.values()) + problem.max_added_buses
    slack = budget - total_min
    if slack < 0:
        return None

    value = 0.0
    best_line, best_coeff = None, 0.0
    for l in lines:
        fam = fams[l]
        value += fam.floor * problem.line_scores[l]
        value += sum(fam.lb[s] * fam.coeff[s] for s in fam.lb)
        value += (fam.f_min - fam.pins) * fam.best_coeff
        if fam.best_coeff > best_coeff:
            best_line, best_coeff = l, fam.best_coeff
    if best_line is not None:
        value += slack * best_coeff

    regular: dict[str, int] = {}
    extension: dict[SlotKey, int] = {}
    for l in lines:
        fam = fams[l]
        bonus = fam.f_min - fam.pins
        if l == best_line:
            bonus += slack
        x_reg = fam.floor
        x_slots = dict(fam.lb)
        if fam.best_var[0] == "reg":
            x_reg += bonus
        else:
            x_slots[fam.best_var[1]] += bonus
        regular[l] = x_reg
        extension.update(x_slots)
    return value, regular, extension


def _upper_bound(
    problem: AllocationProblem,
    order: Sequence[str],
    depth: int,
    chosen: Mapping[str, SlotKey],
    used: set[SlotKey],
    floors: Mapping[str, int],
    options: Mapping[str, Sequence[tuple[SlotKey, float]]],
) -> float:
    """Admissible value bound for any completion of a partial matching."""
    total_buses = sum(problem.base_fleet.values()) + problem.max_added_buses
    pinned = sum(floors.values())
    coeffs = [problem.line_scores[l] for l in problem.base_fleet]
    acc = sum(floors[l] * problem.line_scores[l] for l in problem.base_fleet)
    for k in order[:depth]:
        slot = chosen[k]
        c = problem.net_value((slot[0], slot[1], k))
        lb = problem.bus_need(k)
        acc += lb * c
        pinned += lb
        coeffs.append(c)
    for k in order[depth:]:
        avail = [c for slot, c in options[k] if slot not in used]
        if not avail:
            return -math.inf
        c = max(avail)
        lb = problem.bus_need(k)
        acc += lb * c
        pinned += lb
        coeffs.append(c)
    free = total_buses - pinned
    if free < 0:
        return -math.inf
    return acc + free * max(0.0, max(coeffs, default=0.0))


def solve_allocation(
    problem: AllocationProblem,
    *,
    keep_original_fleet: bool = False,
    regular_floor: int = 0,
    max_pull_per_line: int = 0,
) -> RemediationPlan:
    """Certified-optimal matching and fleet allocation.

    keep_original_fleet pins every regular line at its base fleet, so the plan
    can only add service (extensions funded entirely by the budget).
    """
    lines = sorted(problem.base_fleet)
    floors = {
        l: problem.base_fleet[l] if keep_original_fleet else min(regular_floor, 10**9)
        for l in lines
    }
    for l in lines:
        if floors[l] < 0:
            raise ValueError("regular_floor must be >= 0")
    clusters = sorted(problem.cluster_demand, key=lambda k: (-problem.cluster_demand[k], k))

    options: dict[str, list[tuple[SlotKey, float]]] = {}
    for k in clusters:
        opts = []
        for slot in problem.slots:
            key = (slot[0], slot[1], k)
            if key in problem.candidate_by_key:
                opts.append((slot, problem.net_value(key)))
        if not opts:
            raise Infeasible(f"cluster {k!r} has no routable extension", cluster_id=k)
        options[k] = opts

    # cheap necessary feasibility check before searching
    need = sum(problem.bus_need(k) for k in clusters) + sum(floors.values())
    budget = sum(problem.base_fleet.values()) + problem.max_added_buses
    if need > budget:
        worst = max(clusters, key=lambda k: (problem.bus_need(k), k)) if clusters else None
        raise Infeasible(
            f"clusters need {need} buses but only {budget} exist; "
            f"largest requirement is cluster {worst!r}",
            cluster_id=worst,
        )

    best: dict = {"value": -math.inf, "chosen": None, "reg": None, "ext": None}

    def descend(depth: int, chosen: dict[str, SlotKey], used: set[SlotKey]) -> None:
        if depth == len(clusters):
            res = _evaluate_matching(problem, chosen, floors, max_pull_per_line)
            if res is None:
                return
            value, reg, ext = res
            if value > best["value"]:
                best.update(value=value, chosen=dict(chosen), reg=reg, ext=ext)
            return
        if best["chosen"] is not None:
            ub = _upper_bound(problem, clusters, depth, chosen, used, floors, options)
            if ub <= best["value"] + 1e-12:
                return
        k = clusters[depth]
        for slot, _ in options[k]:
            if slot in used:
                continue
            chosen[k] = slot
            used.add(slot)
            descend(depth + 1, chosen, used)
            used.discard(slot)
            del chosen[k]

    descend(0, {}, set())
    if best["chosen"] is None:
        worst = max(clusters, key=lambda k: (problem.bus_need(k), k)) if clusters else None
        raise Infeasible(
            "no matching satisfies the capacity and budget constraints",
            cluster_id=worst,
        )

    chosen = best["chosen"]
    pairings = tuple(sorted((slot[0], slot[1], k) for k, slot in chosen.items()))
    extension = {
        (l, t): best["ext"][(l, t)] for (l, t, _k) in pairings
    }
    regular = dict(best["reg"])
    added = {
        l: regular[l] + sum(x for (sl, _t), x in extension.items() if sl == l)
        - problem.base_fleet[l]
        for l in lines
    }
    orders = {key: problem.candidate_by_key[key].order for key in pairings}
    f1 = access_score(problem, regular, extension, pairings)
    f2 = distance_score(problem, extension, pairings)
    plan = RemediationPlan(
        pairings=pairings,
        regular_fleet=regular,
        extension_fleet=extension,
        added=added,
        objective_access=f1,
        objective_distance=f2,
        objective=f1 - problem.distance_weight * f2,
        extension_orders=orders,
        max_added_buses=problem.max_added_buses,
        distance_weight=problem.distance_weight,
        certified_optimal=all(
            problem.candidate_by_key[key].certified_optimal for key in pairings
        ),
    )
    violations = validate_plan(problem, plan)
    if violations:
        raise AssertionError(f"solver produced an invalid plan: {violations}")
    return plan


def validate_plan(problem: AllocationProblem, plan: RemediationPlan) -> list[str]:
    """Machine check of every plan constraint; empty list means valid."""
    bad: list[str] = []
    served: dict[str, SlotKey] = {}
    used_slots: set[SlotKey] = set()
    for (l, t, k) in plan.pairings:
        if (l, t, k) not in problem.candidate_by_key:
            bad.append(f"pairing {(l, t, k)} has no candidate")
            continue
        if k in served:
            bad.append(f"cluster {k!r} served twice")
        if (l, t) in used_slots:
            bad.append(f"extension {(l, t)} serves two clusters")
        served[k] = (l, t)
        used_slots.add((l, t))
    for k in problem.cluster_demand:
        if k not in served:
            bad.append(f"cluster {k!r} not served")

    for slot, x in plan.extension_fleet.items():
        if slot not in used_slots:
            if x != 0:
                bad.append(f"inactive extension {slot} holds {x} buses")
        elif not (1 <= x <= problem.big_m):
            bad.append(f"extension {slot} fleet {x} outside [1, {problem.big_m}]")
        if x != int(x) or x < 0:
            bad.append(f"extension {slot} fleet {x} not a nonnegative integer")
    for slot in used_slots:
        if slot not in plan.extension_fleet:
            bad.append(f"activated extension {slot} has no fleet entry")

    for k, slot in served.items():
        x = plan.extension_fleet.get(slot, 0)
        if problem.cluster_demand[k] > problem.cap_per_bus * x + 1e-9:
            bad.append(f"cluster {k!r} demand exceeds capacity of {slot}")

    total_added = 0
    for l, base in problem.base_fleet.items():
        x_l = plan.regular_fleet.get(l)
        if x_l is None or x_l < 0 or x_l != int(x_l):
            bad.append(f"regular line {l!r} fleet {x_l!r} invalid")
            continue
        fam = x_l + sum(
            x for (sl, _t), x in plan.extension_fleet.items() if sl == l
        )
        n_l = fam - base
        if plan.added.get(l) != n_l:
            bad.append(f"line {l!r} added-bus record {plan.added.get(l)} != {n_l}")
        total_added += n_l
    if total_added > plan.max_added_buses:
        bad.append(f"added buses {total_added} exceed budget {plan.max_added_buses}")

    f1 = access_score(problem, plan.regular_fleet, plan.extension_fleet, plan.pairings)
    f2 = distance_score(problem, plan.extension_fleet, plan.pairings)
    if abs(f1 - plan.objective_access) > 1e-9 or abs(f2 - plan.objective_distance) > 1e-9:
        bad.append("objective components do not match the recorded fleets")
    if abs((f1 - problem.distance_weight * f2) - plan.objective) > 1e-9:
        bad.append("objective total does not match its components")
    return bad


def realize_plan(
    disrupted: TransitNetwork, problem: AllocationProblem, plan: RemediationPlan
) -> TransitNetwork:
    """Disrupted network plus the plan: extensions added, fleets reassigned."""
    net = disrupted
    for (l, t, k) in plan.pairings:
        cand = problem.candidate_by_key[(l, t, k)]
        ext = apply_extension(
            disrupted.line(l), t, cand.order, plan.extension_fleet[(l, t)]
        )
        net = add_line(net, ext)
    net = set_fleets(net, dict(plan.regular_fleet), tag="ours")
    return net


# --- plan (de)serialisation ---------------------------------------------------

def plan_to_dict(plan: RemediationPlan) -> dict:
    return {
        "pairings": [list(p) for p in plan.pairings],
        "regular_fleet": {l: x for l, x in sorted(plan.regular_fleet.items())},
        "extension_fleet": [
            [l, t, x] for (l, t), x in sorted(plan.extension_fleet.items())
        ],
        "added": {l: n for l, n in sorted(plan.added.items())},
        "objective_access": plan.objective_access,
        "objective_distance": plan.objective_distance,
        "objective": plan.objective,
        "extension_orders": [
            [l, t, k, list(order)]
            for (l, t, k), order in sorted(plan.extension_orders.items())
        ],
        "max_added_buses": plan.max_added_buses,
        "distance_weight": plan.distance_weight,
        "certified_optimal": plan.certified_optimal,
    }


def plan_from_dict(doc: dict) -> RemediationPlan:
    return RemediationPlan(
        pairings=tuple((l, t, k) for l, t, k in doc["pairings"]),
        regular_fleet=dict(doc["regular_fleet"]),
        extension_fleet={(l, t): x for l, t, x in doc["extension_fleet"]},
        added=dict(doc["added"]),
        objective_access=doc["objective_access"],
        objective_distance=doc["objective_distance"],
        objective=doc["objective"],
        extension_orders={
            (l, t, k): tuple(order) for l, t, k, order in doc["extension_orders"]
        },
        max_added_buses=doc["max_added_buses"],
        distance_weight=doc["distance_weight"],
        certified_optimal=doc["certified_optimal"],
    )
