"""Rail-line disruption, stranded demand, and the replacement-bus baseline."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import UnknownLine
from .network import (
    MODE_DWELL_MIN,
    MODE_SPEED_KMH,
    RAIL_MODES,
    Line,
    LineKind,
    Mode,
    TransitNetwork,
    add_line,
)

REPLACEMENT_LINE_ID = "replacement"


@dataclass(frozen=True)
class DisruptionScenario:
    disrupted_line: str
    demand: Mapping[str, float]  # station id -> passengers per unit time
    dmax_m: float = 500.0
    cap_per_bus: float = 120.0
    max_added_buses: int = 0
    seed: int = 42


def disrupt(net: TransitNetwork, line_id: str) -> TransitNetwork:
    """Snapshot with a rail line withdrawn and its stations marked disrupted.

    Disrupted stations stay in the walk graph; they refuse rail boardings but
    may be served by buses (the replacement line and extensions rely on that).
    """
    line = net.line(line_id)
    if line.mode not in RAIL_MODES:
        raise UnknownLine(f"line {line_id!r} is not a rail line; cannot disrupt")
    return replace(
        net,
        lines=tuple(l for l in net.lines if l.id != line_id),
        tag="disrupted",
        disrupted_line=line_id,
        disrupted_stations=tuple(line.stops),
    )


def gen_demand(
    station_ids: tuple[str, ...] | list[str],
    seed: int = 42,
    shape: float = 5.0,
    scale: float = 1.0,
    adjustment: float = 1.0,
) -> dict[str, float]:
    """Synthetic stranded demand per disrupted station.

    Per station (in sorted id order) a rate is drawn from a Gamma(shape, scale)
    distribution and scaled by the adjustment factor; the reported demand is
    the mean of 7 Poisson draws at that rate. The generator is
    numpy.random.default_rng (PCG64), so one seed pins the whole vector.
    """
    rng = np.random.default_rng(seed)
    out: dict[str, float] = {}
    for sid in sorted(station_ids):
        lam = float(rng.gamma(shape, scale)) * adjustment
        draws = rng.poisson(lam, 7)
        out[sid] = float(draws.mean())
    return out


def build_replacement(disrupted: TransitNetwork, extra_buses: int) -> TransitNetwork:
    """Conventional baseline: one bus line over the disrupted stations in order.

    With zero extra buses the line is inactive and the snapshot routes exactly
    like the disrupted one.
    """
    if disrupted.disrupted_line is None:
        raise UnknownLine("network has no disrupted line to replace")
    if extra_buses < 0:
        raise ValueError("extra_buses must be >= 0")
    line = Line(
        id=REPLACEMENT_LINE_ID,
        mode=Mode.BUS,
        stops=tuple(disrupted.disrupted_stations),
        fleet=int(extra_buses),
        speed_kmh=MODE_SPEED_KMH[Mode.BUS],
        dwell_min=MODE_DWELL_MIN[Mode.BUS],
        kind=LineKind.REPLACEMENT,
    )
    return add_line(disrupted, line, tag="replacement")
