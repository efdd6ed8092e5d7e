"""Batch command-line front end.

Pipeline order: build -> disrupt -> baseline/remediate/export-ip -> evaluate.
Each command is idempotent and reads earlier artifacts from the output
directory; a manifest keyed by the content hash of the scenario file (plus any
effective overrides) rejects mixing artifacts from different configurations.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

from . import figures, report
from .accessibility import AccessibilityField
from .errors import BusRemedyError, ConfigError, MissingArtifact
from .ip_model import build_model, write_model
from .network import TransitNetwork, network_from_json, network_to_json
from .pipeline import (
    demand_for,
    field_for,
    make_disrupted,
    make_replacement,
    remediate,
)
from .scenario import DemandParams, Scenario, load_scenario
from .stage2 import plan_to_dict, validate_plan

MANIFEST = "manifest.json"


# --- manifest and artifact helpers ---------------------------------------------

def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _config_key(config_path: Path, scenario: Scenario) -> str:
    digest = hashlib.sha256()
    digest.update(config_path.read_bytes())
    knobs = {
        "walk_radius_km": scenario.walk_radius_km,
        "walking_speed_kmh": scenario.walking_speed_kmh,
        "dmax_m": scenario.dmax_m,
        "cap_per_bus": scenario.cap_per_bus,
        "weight_f2": scenario.weight_f2,
        "seed": scenario.demand.seed,
    }
    digest.update(json.dumps(knobs, sort_keys=True).encode("ascii"))
    return digest.hexdigest()


def _load_manifest(out: Path) -> dict:
    path = out / MANIFEST
    if not path.exists():
        return {"config": None, "artifacts": {}}
    try:
        return json.loads(path.read_text(encoding="ascii"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"unreadable manifest {path}: {exc}") from exc


def _check_manifest(out: Path, key: str) -> dict:
    manifest = _load_manifest(out)
    if manifest["config"] is not None and manifest["config"] != key:
        raise ConfigError(
            f"{out} holds artifacts for a different config/overrides; "
            "use a fresh --out directory"
        )
    manifest["config"] = key
    return manifest


def _save_manifest(out: Path, manifest: dict) -> None:
    payload = {
        "config": manifest["config"],
        "artifacts": dict(sorted(manifest["artifacts"].items())),
    }
    (out / MANIFEST).write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="ascii"
    )


def _record(out: Path, manifest: dict, name: str) -> None:
    manifest["artifacts"][name] = _sha256_bytes((out / name).read_bytes())


def _need(out: Path, manifest: dict, name: str, producer: str) -> Path:
    path = out / name
    recorded = manifest["artifacts"].get(name)
    if recorded is None or not path.exists():
        raise MissingArtifact(f"missing artifact {name}; run `busremedy {producer}` first")
    if _sha256_bytes(path.read_bytes()) != recorded:
        raise ConfigError(f"artifact {name} was modified after it was written; rerun `busremedy {producer}`")
    return path


def _write_network(out: Path, manifest: dict, name: str, net: TransitNetwork) -> None:
    (out / name).write_text(network_to_json(net) + "\n", encoding="ascii")
    _record(out, manifest, name)


def _read_network(path: Path) -> TransitNetwork:
    return network_from_json(path.read_text(encoding="ascii"))


def _write_field(out: Path, manifest: dict, name: str, field: AccessibilityField, grid) -> None:
    report.write_field_csv(field, grid, out / name)
    _record(out, manifest, name)


def _read_field(path: Path, tag: str) -> AccessibilityField:
    values: dict[int, float] = {}
    with open(path, newline="", encoding="ascii") as fh:
        for row in csv.DictReader(fh):
            values[int(row["tile_id"])] = float(row["access"])
    return AccessibilityField(network_tag=tag, values=values)


# --- commands -------------------------------------------------------------------

def _prepare(args) -> tuple[Scenario, Path, dict]:
    scenario = load_scenario(args.config)
    scenario = _apply_overrides(scenario, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = _check_manifest(out, _config_key(Path(args.config), scenario))
    return scenario, out, manifest


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    from dataclasses import replace

    updates = {}
    if getattr(args, "walk_radius_km", None) is not None:
        updates["walk_radius_km"] = args.walk_radius_km
    if getattr(args, "dmax_m", None) is not None:
        updates["dmax_m"] = args.dmax_m
    if getattr(args, "cap", None) is not None:
        updates["cap_per_bus"] = args.cap
    if getattr(args, "weight_f2", None) is not None:
        updates["weight_f2"] = args.weight_f2
    if getattr(args, "seed", None) is not None:
        updates["demand"] = DemandParams(
            shape=scenario.demand.shape,
            scale=scenario.demand.scale,
            adjustment=scenario.demand.adjustment,
            seed=args.seed,
        )
    return replace(scenario, **updates) if updates else scenario


def cmd_build(args) -> int:
    scenario, out, manifest = _prepare(args)
    net = scenario.network
    field = field_for(scenario, net)
    _write_network(out, manifest, "network_original.json", net)
    _write_field(out, manifest, "access_original.csv", field, net.grid)
    _save_manifest(out, manifest)
    print(f"built {scenario.name}: {len(net.grid.tiles)} tiles, "
          f"{len(net.lines)} lines, mean access {field.mean:.6f}")
    return 0


def cmd_disrupt(args) -> int:
    scenario, out, manifest = _prepare(args)
    _need(out, manifest, "network_original.json", "build")
    disrupted = make_disrupted(scenario, args.line)
    field = field_for(scenario, disrupted)
    demand = demand_for(scenario, disrupted)
    _write_network(out, manifest, "network_disrupted.json", disrupted)
    _write_field(out, manifest, "access_disrupted.csv", field, disrupted.grid)
    (out / "demand.json").write_text(
        json.dumps(demand, sort_keys=True, indent=1) + "\n", encoding="ascii"
    )
    _record(out, manifest, "demand.json")
    _save_manifest(out, manifest)
    print(f"disrupted {disrupted.disrupted_line}: {len(disrupted.disrupted_stations)} "
          f"stations cut, mean access {field.mean:.6f}")
    return 0


def cmd_baseline(args) -> int:
    scenario, out, manifest = _prepare(args)
    disrupted = _read_network(_need(out, manifest, "network_disrupted.json", "disrupt"))
    b = args.extra_buses
    replacement = make_replacement(scenario, disrupted, b)
    field = field_for(scenario, replacement)
    _write_network(out, manifest, f"network_replacement_b{b}.json", replacement)
    _write_field(out, manifest, f"access_replacement_b{b}.csv", field, replacement.grid)
    _save_manifest(out, manifest)
    print(f"replacement shuttle with {b} buses: mean access {field.mean:.6f}")
    return 0


def cmd_remediate(args) -> int:
    scenario, out, manifest = _prepare(args)
    disrupted = _read_network(_need(out, manifest, "network_disrupted.json", "disrupt"))
    b = args.extra_buses
    result = remediate(
        scenario,
        disrupted,
        b,
        keep_original_fleet=args.keep_original_fleet,
        max_pull_per_line=args.max_pull_per_line,
    )
    issues = validate_plan(result.problem, result.plan)
    if issues:  # solve_allocation already validates; double check before writing
        raise BusRemedyError(f"plan failed validation: {issues}")
    field = field_for(scenario, result.network)
    (out / f"plan_b{b}.json").write_text(
        json.dumps(plan_to_dict(result.plan), sort_keys=True, indent=1) + "\n",
        encoding="ascii",
    )
    _record(out, manifest, f"plan_b{b}.json")
    _write_network(out, manifest, f"network_ours_b{b}.json", result.network)
    _write_field(out, manifest, f"access_ours_b{b}.csv", field, result.network.grid)
    _save_manifest(out, manifest)
    exts = ", ".join(f"{l}/{t}->{k}" for l, t, k in result.plan.pairings)
    print(f"plan with {b} extra buses: objective {result.plan.objective:.6f}, "
          f"extensions [{exts}], mean access {field.mean:.6f}")
    return 0


def cmd_export_ip(args) -> int:
    scenario, out, manifest = _prepare(args)
    disrupted = _read_network(_need(out, manifest, "network_disrupted.json", "disrupt"))
    demand = demand_for(scenario, disrupted)
    model = build_model(
        disrupted,
        demand,
        dmax_m=scenario.dmax_m,
        cap_per_bus=scenario.cap_per_bus,
        max_added_buses=args.extra_buses,
        distance_weight=scenario.weight_f2,
    )
    name = f"model_b{args.extra_buses}.lp"
    write_model(model, out / name)
    _record(out, manifest, name)
    _save_manifest(out, manifest)
    print(f"wrote {name}: {len(model.variables)} variables, "
          f"{len(model.constraints)} constraints")
    return 0


def _budgets(manifest: dict, prefix: str) -> list[int]:
    out = []
    for name in manifest["artifacts"]:
        if name.startswith(prefix) and name.endswith(".csv"):
            out.append(int(name[len(prefix):-len(".csv")]))
    return sorted(out)


def cmd_evaluate(args) -> int:
    scenario, out, manifest = _prepare(args)
    grid = scenario.network.grid
    net_o = _read_network(_need(out, manifest, "network_original.json", "build"))
    field_o = _read_field(_need(out, manifest, "access_original.csv", "build"), "original")
    net_d = _read_network(_need(out, manifest, "network_disrupted.json", "disrupt"))
    field_d = _read_field(_need(out, manifest, "access_disrupted.csv", "disrupt"), "disrupted")

    snapshots: list[tuple[str, TransitNetwork, AccessibilityField]] = []
    for b in _budgets(manifest, "access_replacement_b"):
        net = _read_network(_need(out, manifest, f"network_replacement_b{b}.json", "baseline"))
        fld = _read_field(
            _need(out, manifest, f"access_replacement_b{b}.csv", "baseline"), f"replacement_b{b}"
        )
        snapshots.append((f"replacement_b{b}", net, fld))
    for b in _budgets(manifest, "access_ours_b"):
        net = _read_network(_need(out, manifest, f"network_ours_b{b}.json", "remediate"))
        fld = _read_field(_need(out, manifest, f"access_ours_b{b}.csv", "remediate"), f"ours_b{b}")
        snapshots.append((f"ours_b{b}", net, fld))

    comparisons = []
    deltas: dict[str, report.DeltaField] = {}
    pairs = [("disrupted", net_d, field_d, "original", net_o, field_o)]
    for tag, net, fld in snapshots:
        pairs.append((tag, net, fld, "original", net_o, field_o))
        pairs.append((tag, net, fld, "disrupted", net_d, field_d))
    ours_budgets = _budgets(manifest, "access_ours_b")
    repl_budgets = set(_budgets(manifest, "access_replacement_b"))
    by_tag = {tag: (net, fld) for tag, net, fld in snapshots}
    for b in ours_budgets:
        if b in repl_budgets:
            net_a, fld_a = by_tag[f"ours_b{b}"]
            net_b, fld_b = by_tag[f"replacement_b{b}"]
            pairs.append((f"ours_b{b}", net_a, fld_a, f"replacement_b{b}", net_b, fld_b))

    for after_tag, net_a, fld_a, before_tag, net_b, fld_b in pairs:
        comp, delta = report.compare(net_b, net_a, fld_b, fld_a)
        comparisons.append(comp)
        key = f"{after_tag}_vs_{before_tag}"
        deltas[key] = delta
        report.write_delta_csv(delta, out / f"delta_{key}.csv")
        _record(out, manifest, f"delta_{key}.csv")
        xs, ps = report.ecdf(list(delta.ratios.values()))
        with open(out / f"ecdf_{key}.csv", "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["relative_change", "fraction"])
            for x, p in zip(xs, ps):
                writer.writerow([repr(x), repr(p)])
        _record(out, manifest, f"ecdf_{key}.csv")
        report.write_map_geojson(delta, grid, net_a, out / f"map_{key}.geojson")
        _record(out, manifest, f"map_{key}.geojson")

    report.write_comparison_json(comparisons, out / "comparisons.json")
    _record(out, manifest, "comparisons.json")

    # impact deciles: improvement of ours over the shuttle at matching budgets
    impact = deltas["disrupted_vs_original"].ratios
    decile_rows = []
    for b in ours_budgets:
        if b not in repl_budgets:
            continue
        improvement = deltas[f"ours_b{b}_vs_replacement_b{b}"].ratios
        medians = report.decile_median_improvement(impact, improvement)
        decile_rows.append((b, medians))
    if decile_rows:
        with open(out / "deciles.csv", "w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["decile"] + [f"median_improvement_b{b}" for b, _ in decile_rows])
            for i in range(10):
                writer.writerow([i] + [repr(meds[i]) for _, meds in decile_rows])
        _record(out, manifest, "deciles.csv")

    summary = {
        "scenario": scenario.name,
        "disrupted_line": net_d.disrupted_line,
        "mean_access": {"original": field_o.mean, "disrupted": field_d.mean},
        "mean_ratio_vs_original": {"disrupted": report.mean_ratio(field_d, field_o)},
        "operating_distance_kmh": {
            "original": report.operating_distance_kmh(net_o),
            "disrupted": report.operating_distance_kmh(net_d),
        },
        "excluded_zero_base_tiles": len(deltas["disrupted_vs_original"].excluded_tiles),
    }
    for tag, net, fld in snapshots:
        summary["mean_access"][tag] = fld.mean
        summary["mean_ratio_vs_original"][tag] = report.mean_ratio(fld, field_o)
        summary["operating_distance_kmh"][tag] = report.operating_distance_kmh(net)
    (out / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=1) + "\n", encoding="ascii"
    )
    _record(out, manifest, "summary.json")

    # figures alongside the delimited output
    figures.render_field_map(field_o, grid, out / "map_access_original.png")
    figures.render_field_map(field_d, grid, out / "map_access_disrupted.png")
    _record(out, manifest, "map_access_original.png")
    _record(out, manifest, "map_access_disrupted.png")
    for tag, _net, fld in snapshots:
        figures.render_field_map(fld, grid, out / f"map_access_{tag}.png")
        _record(out, manifest, f"map_access_{tag}.png")
    figures.render_delta_map(deltas["disrupted_vs_original"], grid, out / "map_delta_disrupted.png")
    _record(out, manifest, "map_delta_disrupted.png")
    ecdf_keys = sorted(k for k in deltas if k.endswith("_vs_disrupted"))
    if ecdf_keys:
        figures.render_ecdf([deltas[k] for k in ecdf_keys], out / "ecdf.png")
        _record(out, manifest, "ecdf.png")
    both = [b for b in ours_budgets if b in repl_budgets]
    if len(both) >= 2:
        figures.render_budget_curves(
            both,
            [report.mean_ratio(by_tag[f"ours_b{b}"][1], field_d) for b in both],
            [report.mean_ratio(by_tag[f"replacement_b{b}"][1], field_d) for b in both],
            [report.operating_distance_kmh(by_tag[f"ours_b{b}"][0]) for b in both],
            [report.operating_distance_kmh(by_tag[f"replacement_b{b}"][0]) for b in both],
            out / "budget_curves.png",
        )
        _record(out, manifest, "budget_curves.png")

    _save_manifest(out, manifest)
    print(f"evaluated {len(comparisons)} comparisons into {out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="busremedy",
        description="Model a transit network, disrupt a rail line, and compare "
        "bus-network remediation against a replacement shuttle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="scenario YAML file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="demand seed override")
        p.add_argument("--walk-radius-km", type=float, default=None)
        p.add_argument("--dmax-m", type=float, default=None)
        p.add_argument("--cap", type=float, default=None, help="passengers per bus")
        p.add_argument("--weight-f2", type=float, default=None,
                       help="weight of the operated-distance term")

    p = sub.add_parser("build", help="accessibility of the intact network")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("disrupt", help="remove the rail line and price the damage")
    common(p)
    p.add_argument("--line", default=None, help="rail line to disrupt")
    p.set_defaults(func=cmd_disrupt)

    p = sub.add_parser("baseline", help="replacement shuttle over the cut stations")
    common(p)
    p.add_argument("--extra-buses", type=int, required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("remediate", help="two-stage extension and reallocation plan")
    common(p)
    p.add_argument("--extra-buses", type=int, required=True)
    p.add_argument("--keep-original-fleet", action="store_true",
                   help="fund extensions from added buses only")
    p.add_argument("--max-pull-per-line", type=int, default=0,
                   help="buses a regular line may surrender to other lines")
    p.set_defaults(func=cmd_remediate)

    p = sub.add_parser("export-ip", help="write the full integer model as LP text")
    common(p)
    p.add_argument("--extra-buses", type=int, required=True)
    p.set_defaults(func=cmd_export_ip)

    p = sub.add_parser("evaluate", help="comparison tables, maps and figures")
    common(p)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MissingArtifact as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return 3
    except BusRemedyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
