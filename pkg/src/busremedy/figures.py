"""Headless figure rendering for report output.

Every figure is drawn with the Agg backend at a fixed dpi and saved without
per-run metadata, so repeated runs of the same scenario produce byte-identical
PNG files.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt

from .accessibility import AccessibilityField
from .errors import IoFailure
from .report import DeltaField, ecdf
from .tessellation import TileGrid

_DPI = 120
# strip the backend's software stamp so output depends only on the data
_META = {"metadata": {"Software": None}}


def _save(fig, path) -> None:
    try:
        fig.savefig(path, dpi=_DPI, **_META)
    except OSError as exc:
        raise IoFailure(f"cannot write figure {path!r}: {exc}") from exc
    finally:
        plt.close(fig)


def _grid_matrix(grid: TileGrid, values: Mapping[int, float]) -> np.ndarray:
    mat = np.full((grid.ny, grid.nx), np.nan)
    for tid, val in values.items():
        iy, ix = divmod(tid, grid.nx)
        mat[iy, ix] = val
    return mat


def render_field_map(field: AccessibilityField, grid: TileGrid, path, title: str | None = None) -> None:
    """Heatmap of access per tile; origin at the grid's south-west corner."""
    fig, ax = plt.subplots(figsize=(6, 5))
    mat = _grid_matrix(grid, field.values)
    im = ax.imshow(mat, origin="lower", cmap="viridis")
    fig.colorbar(im, ax=ax, label="access (opportunities/min)")
    ax.set_title(title or f"access: {field.network_tag}")
    ax.set_xlabel("tile column")
    ax.set_ylabel("tile row")
    _save(fig, path)


def render_delta_map(delta: DeltaField, grid: TileGrid, path) -> None:
    """Diverging heatmap of relative change, symmetric about zero."""
    fig, ax = plt.subplots(figsize=(6, 5))
    mat = _grid_matrix(grid, delta.ratios)
    finite = [v for v in delta.ratios.values()]
    span = max((abs(v) for v in finite), default=1.0) or 1.0
    im = ax.imshow(mat, origin="lower", cmap="RdBu", vmin=-span, vmax=span)
    fig.colorbar(im, ax=ax, label="relative change")
    ax.set_title(f"{delta.after_tag} vs {delta.before_tag}")
    ax.set_xlabel("tile column")
    ax.set_ylabel("tile row")
    _save(fig, path)


def render_ecdf(deltas: Sequence[DeltaField], path) -> None:
    """Step ECDFs of per-tile relative change for several comparisons."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for delta in deltas:
        xs, ps = ecdf(list(delta.ratios.values()))
        ax.step(xs, ps, where="post", label=f"{delta.after_tag} vs {delta.before_tag}")
    ax.axvline(0.0, color="grey", linewidth=0.8)
    ax.set_xlabel("relative change in access")
    ax.set_ylabel("fraction of tiles")
    ax.set_ylim(0, 1)
    ax.legend(loc="lower right", fontsize=8)
    _save(fig, path)


def render_budget_curves(
    budgets: Sequence[int],
    ours_mean: Sequence[float],
    repl_mean: Sequence[float],
    ours_km: Sequence[float],
    repl_km: Sequence[float],
    path,
) -> None:
    """Mean recovery and operating distance against the added-bus budget."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.plot(budgets, ours_mean, marker="o", label="reallocation")
    ax1.plot(budgets, repl_mean, marker="s", label="replacement shuttle")
    ax1.set_xlabel("extra buses")
    ax1.set_ylabel("mean relative change vs disrupted")
    ax1.legend(fontsize=8)
    ax2.plot(budgets, ours_km, marker="o", label="reallocation")
    ax2.plot(budgets, repl_km, marker="s", label="replacement shuttle")
    ax2.set_xlabel("extra buses")
    ax2.set_ylabel("operating distance (km/h)")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
