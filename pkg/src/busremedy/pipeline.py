"""End-to-end orchestration from a scenario to snapshots, plans and metrics.

The four network snapshots are tagged "original", "disrupted", "replacement"
and "ours". Every function here is pure computation over those snapshots; file
handling lives in the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass

from .accessibility import AccessibilityField, acc_cluster, compute_field, node_scores
from .disruption import build_replacement, disrupt, gen_demand
from .errors import ConfigError
from .network import TransitNetwork
from .scenario import Scenario
from .stage1 import (
    Cluster,
    ConsolidationAssignment,
    assign_consolidation,
    cluster_nodes,
    enumerate_candidates,
    extendable_lines,
)
from .stage2 import AllocationProblem, RemediationPlan, realize_plan, solve_allocation


def field_for(scenario: Scenario, net: TransitNetwork) -> AccessibilityField:
    return compute_field(
        net,
        walk_radius_km=scenario.walk_radius_km,
        walking_speed_kmh=scenario.walking_speed_kmh,
    )


def pick_disrupted_line(scenario: Scenario, line_id: str | None) -> str:
    chosen = line_id or scenario.disrupt_line
    if chosen is None:
        raise ConfigError("no disruption target: pass a line id or set disrupt_line")
    return chosen


def make_disrupted(scenario: Scenario, line_id: str | None = None) -> TransitNetwork:
    return disrupt(scenario.network, pick_disrupted_line(scenario, line_id))


def demand_for(scenario: Scenario, disrupted_net: TransitNetwork) -> dict[str, float]:
    p = scenario.demand
    return gen_demand(
        disrupted_net.disrupted_stations,
        seed=p.seed,
        shape=p.shape,
        scale=p.scale,
        adjustment=p.adjustment,
    )


def make_replacement(
    scenario: Scenario, disrupted_net: TransitNetwork, extra_buses: int
) -> TransitNetwork:
    return build_replacement(disrupted_net, extra_buses)


@dataclass(frozen=True)
class RemediationResult:
    """Everything the remediation step produced, for reporting and validation."""

    demand: dict[str, float]
    assignment: ConsolidationAssignment
    clusters: tuple[Cluster, ...]
    problem: AllocationProblem
    plan: RemediationPlan
    network: TransitNetwork


def remediate(
    scenario: Scenario,
    disrupted_net: TransitNetwork,
    extra_buses: int,
    *,
    weight_f2: float | None = None,
    keep_original_fleet: bool = False,
    regular_floor: int = 0,
    max_pull_per_line: int = 0,
) -> RemediationResult:
    """Run both heuristic stages on a disrupted snapshot and realize the plan."""
    demand = demand_for(scenario, disrupted_net)
    assignment = assign_consolidation(
        disrupted_net, disrupted_net.disrupted_stations, dmax_m=scenario.dmax_m
    )
    clusters = cluster_nodes(
        disrupted_net,
        assignment,
        demand,
        eps_km=scenario.clustering.eps_km,
        min_samples=scenario.clustering.min_samples,
    )
    lines = extendable_lines(disrupted_net)
    candidates = enumerate_candidates(disrupted_net, lines, clusters)

    # access scores on the disrupted snapshot, one routing pass for all nodes
    wanted = sorted(
        {stop for line in lines for stop in line.stops}
        | {n for c in clusters for n in c.members}
    )
    values = node_scores(
        disrupted_net,
        wanted,
        walk_radius_km=scenario.walk_radius_km,
        walking_speed_kmh=scenario.walking_speed_kmh,
    )
    line_access = {
        line.id: sum(values[s] for s in set(line.stops)) / len(set(line.stops))
        for line in lines
    }
    cluster_access = {c.id: acc_cluster(values, c.members) for c in clusters}
    pairing_scores = {
        cand.key: line_access[cand.line_id] + cluster_access[cand.cluster_id]
        for cand in candidates
    }

    problem = AllocationProblem(
        candidates=candidates,
        pairing_scores=pairing_scores,
        line_scores=line_access,
        base_fleet={line.id: line.fleet for line in lines},
        cluster_demand={c.id: c.demand for c in clusters},
        cap_per_bus=scenario.cap_per_bus,
        max_added_buses=extra_buses,
        distance_weight=scenario.weight_f2 if weight_f2 is None else weight_f2,
    )
    plan = solve_allocation(
        problem,
        keep_original_fleet=keep_original_fleet,
        regular_floor=regular_floor,
        max_pull_per_line=max_pull_per_line,
    )
    network = realize_plan(disrupted_net, problem, plan)
    return RemediationResult(demand, assignment, clusters, problem, plan, network)
