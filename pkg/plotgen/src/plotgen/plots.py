"""Scatter and heatmap figures from benchmark CSVs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from .csvio import BENCH_COLUMNS, SCAN_COLUMNS, PlotDataError, read_csv


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output_image: str
    dpi: int = 200
    x_label: str | None = None
    y_label: str | None = None

    def __post_init__(self):
        if self.kind not in ("scatter", "heatmap"):
            raise PlotDataError(f"kind must be 'scatter' or 'heatmap', got {self.kind!r}")


@dataclass
class ScatterResult:
    output_image: str
    panels: list = field(default_factory=list)  # (d, n, rows)


@dataclass
class HeatmapResult:
    output_image: str
    p_values: np.ndarray
    theta_values: np.ndarray
    gap_grid: np.ndarray
    zero_contour_drawn: bool
    negative_points: int

    def negative_region_size(self, p: float, theta: float, threshold: float = 0.0) -> int:
        """Grid size of the contiguous gap<threshold region containing (p, theta).

        Returns 0 when the nearest grid point is not below the threshold, so a
        positive value certifies that the zero contour encloses the point.
        """
        i = int(np.argmin(np.abs(self.p_values - p)))
        j = int(np.argmin(np.abs(self.theta_values - theta)))
        mask = self.gap_grid < threshold
        if not mask[i, j]:
            return 0
        seen = {(i, j)}
        queue = deque([(i, j)])
        while queue:
            a, b = queue.popleft()
            for da, db in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nb = (a + da, b + db)
                if 0 <= nb[0] < mask.shape[0] and 0 <= nb[1] < mask.shape[1] \
                        and nb not in seen and mask[nb]:
                    seen.add(nb)
                    queue.append(nb)
        return len(seen)


def plot_scatter(spec: PlotSpec) -> ScatterResult:
    """Per-trial bounds against the entropy sum, one panel per (d, n) group."""
    cols = read_csv(spec.input_csv, BENCH_COLUMNS)
    n_rows = cols["trial"].size
    if n_rows == 0:
        raise PlotDataError(f"{spec.input_csv}: no data rows to plot")
    groups = sorted({(int(d), int(n)) for d, n in zip(cols["d"], cols["n"])})
    fig, axes = plt.subplots(1, len(groups), figsize=(5.2 * len(groups), 4.6), squeeze=False)
    result = ScatterResult(output_image=str(spec.output_image))
    entropy_sum = cols["h_m"] + cols["h_n"]
    series = (("eur1", "tab:blue"), ("eur2", "tab:red"), ("eur3", "tab:green"))
    for ax, (d, n) in zip(axes[0], groups):
        sel = (cols["d"] == d) & (cols["n"] == n)
        x = entropy_sum[sel]
        for name, color in series:
            y = cols[name][sel]
            finite = np.isfinite(y)
            ax.scatter(x[finite], y[finite], s=4, alpha=0.35, color=color,
                       label=name.upper(), linewidths=0)
        top = float(max(x.max(), 1.0))
        ax.plot([0, top], [0, top], "k--", linewidth=0.8, label="y = x")
        ax.set_xlabel(spec.x_label or "H(M) + H(N) [bits]")
        ax.set_ylabel(spec.y_label or "lower bound [bits]")
        ax.set_title(f"d = {d}, n = {n} ({int(sel.sum())} trials)")
        ax.legend(loc="upper left", fontsize=8)
        result.panels.append((d, n, int(sel.sum())))
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=spec.dpi)
    plt.close(fig)
    return result


def _grid_from_columns(path, p, theta, gap):
    ps = np.unique(p)
    ts = np.unique(theta)
    if ps.size * ts.size != p.size:
        raise PlotDataError(f"{path}: (p, theta) points do not form a complete grid")
    grid = np.full((ps.size, ts.size), np.nan)
    pi = {v: i for i, v in enumerate(ps)}
    ti = {v: i for i, v in enumerate(ts)}
    for pv, tv, gv in zip(p, theta, gap):
        grid[pi[pv], ti[tv]] = gv
    if np.isnan(grid).any():
        raise PlotDataError(f"{path}: duplicate or missing grid points")
    return ps, ts, grid


def plot_heatmap(spec: PlotSpec) -> HeatmapResult:
    """Sign/magnitude map of the gap over (p, theta) with a zero contour."""
    cols = read_csv(spec.input_csv, SCAN_COLUMNS)
    if cols["p"].size == 0:
        raise PlotDataError(f"{spec.input_csv}: no data rows to plot")
    ps, ts, grid = _grid_from_columns(spec.input_csv, cols["p"], cols["theta"], cols["gap"])
    lo, hi = float(grid.min()), float(grid.max())
    fig, ax = plt.subplots(figsize=(6.4, 5.0))
    if lo < 0 < hi:
        norm = TwoSlopeNorm(vmin=lo, vcenter=0.0, vmax=hi)
    else:
        norm = None
    mesh = ax.pcolormesh(ts, ps, grid, shading="nearest", cmap="RdBu", norm=norm)
    fig.colorbar(mesh, ax=ax, label="gap [bits]")
    zero_contour = bool(lo < 0.0 < hi)
    if zero_contour:
        ax.contour(ts, ps, grid, levels=[0.0], colors="black", linewidths=1.2)
    negative_points = int((grid < 0).sum())
    if negative_points == 0:
        ax.annotate("no negative-gap region", xy=(0.5, 0.5), xycoords="axes fraction",
                    ha="center", fontsize=11,
                    bbox=dict(boxstyle="round", facecolor="white", alpha=0.8))
    ax.set_xlabel(spec.x_label or "theta [degrees]")
    ax.set_ylabel(spec.y_label or "mixing weight p")
    ax.set_title("negative-gap region (zero contour in black)" if zero_contour
                 else "gap over the (p, theta) grid")
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=spec.dpi)
    plt.close(fig)
    return HeatmapResult(
        output_image=str(spec.output_image),
        p_values=ps,
        theta_values=ts,
        gap_grid=grid,
        zero_contour_drawn=zero_contour,
        negative_points=negative_points,
    )
