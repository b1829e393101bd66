"""Figure and report-file rendering for the CLI: every report is written as
delimited text plus a matplotlib figure next to it."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluator import MetricReport, RegionMask, Scenario
from .geometry import Point2D
from .planner import GlobalPath
from .simulator import OccupancyGrid, Trajectory
from .stats import StatResult

# cell classification colors: TP black, FP green, FN red, TN white
_CLASS_COLORS = {
    "tp": (0.0, 0.0, 0.0),
    "fp": (0.0, 0.7, 0.2),
    "fn": (0.85, 0.1, 0.1),
    "tn": (1.0, 1.0, 1.0),
}


def _extent(geometry) -> tuple[float, float, float, float]:
    o = geometry.origin
    return (
        o.x,
        o.x + geometry.width * geometry.resolution,
        o.y,
        o.y + geometry.height * geometry.resolution,
    )


def write_metrics_csv(report: MetricReport, file: Union[str, Path]) -> None:
    """`metric,value` rows; undefined metrics render as empty values."""
    with open(file, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for name, value in report.rows():
            writer.writerow([name, "" if value is None else repr(value)])


def write_metrics_json(
    report: MetricReport,
    file: Union[str, Path],
    scenario: Optional[Scenario] = None,
    extra: Optional[dict] = None,
) -> None:
    """Structured report consumed by the CLI and the browser client."""
    doc = {"metrics": report.as_dict()}
    if scenario is not None:
        doc["scenario"] = scenario.name
    if extra:
        doc.update(extra)
    Path(file).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def classification_figure(
    gt_mask: RegionMask,
    drawn_mask: RegionMask,
    file: Union[str, Path],
    drawn_points: Optional[Sequence[Point2D]] = None,
    scenario: Optional[Scenario] = None,
) -> None:
    """Cell-by-cell comparison image of the drawn region against the GT."""
    gt = gt_mask.cells
    drawn = drawn_mask.cells
    rgb = np.empty((*gt.shape, 3))
    rgb[:] = _CLASS_COLORS["tn"]
    rgb[gt & ~drawn] = _CLASS_COLORS["fn"]
    rgb[~gt & drawn] = _CLASS_COLORS["fp"]
    rgb[gt & drawn] = _CLASS_COLORS["tp"]

    fig, ax = plt.subplots(figsize=(8, 6))
    ax.imshow(rgb, origin="lower", extent=_extent(gt_mask.geometry), interpolation="nearest")
    if scenario is not None:
        cx = [p.x for p in scenario.tape_centerline]
        cy = [p.y for p in scenario.tape_centerline]
        ax.plot(cx, cy, "--", color="tab:blue", linewidth=1.0, label="tape centerline")
    if drawn_points is not None:
        ax.plot(
            [p.x for p in drawn_points],
            [p.y for p in drawn_points],
            "-o",
            color="tab:orange",
            markersize=2,
            linewidth=1.0,
            label="drawn path",
        )
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="upper right", fontsize=8)
    ax.set_title("cell classification (TP black, FP green, FN red)")
    fig.savefig(file, dpi=150, bbox_inches="tight")
    plt.close(fig)


def trajectory_figure(
    file: Union[str, Path],
    trajectory: Optional[Trajectory] = None,
    path: Optional[GlobalPath] = None,
    scenario: Optional[Scenario] = None,
    grid: Optional[OccupancyGrid] = None,
) -> None:
    """Overview plot: map obstacles, tape centerline, global path, trajectory."""
    fig, ax = plt.subplots(figsize=(8, 6))
    if grid is not None and grid.cells.any():
        shown = np.where(grid.cells, 0.0, np.nan)
        ax.imshow(
            shown,
            origin="lower",
            extent=_extent(grid.geometry),
            cmap="gray",
            vmin=0.0,
            vmax=1.0,
            interpolation="nearest",
        )
    if scenario is not None:
        cx = [p.x for p in scenario.tape_centerline]
        cy = [p.y for p in scenario.tape_centerline]
        ax.plot(cx, cy, "--", color="tab:red", linewidth=1.5, label="tape centerline")
    if path is not None:
        ax.plot(
            [p.position.x for p in path.poses],
            [p.position.y for p in path.poses],
            "-o",
            color="tab:green",
            markersize=3,
            linewidth=1.0,
            label="global path",
        )
    if trajectory is not None:
        pts = trajectory.positions
        ax.plot(
            [p.x for p in pts],
            [p.y for p in pts],
            color="tab:blue",
            linewidth=1.2,
            label=f"trajectory ({trajectory.outcome.value})",
        )
        ax.plot(pts[0].x, pts[0].y, "^", color="tab:blue", markersize=7)
        ax.plot(pts[-1].x, pts[-1].y, "s", color="tab:blue", markersize=7)
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.grid(True, alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    fig.savefig(file, dpi=150, bbox_inches="tight")
    plt.close(fig)


def write_stat_csv(result: StatResult, file: Union[str, Path]) -> None:
    with open(file, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["field", "value"])
        for name, value in result.as_dict().items():
            writer.writerow([name, value])


def write_stat_json(result: StatResult, file: Union[str, Path]) -> None:
    Path(file).write_text(json.dumps(result.as_dict(), indent=2) + "\n", encoding="utf-8")


def paired_comparison_figure(
    condition_a: Sequence[float],
    condition_b: Sequence[float],
    file: Union[str, Path],
    labels: tuple[str, str] = ("condition_a", "condition_b"),
) -> None:
    """Boxplots of both conditions with per-participant pairing lines."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.boxplot([condition_a, condition_b], tick_labels=list(labels), widths=0.5)
    for a, b in zip(condition_a, condition_b):
        ax.plot([1, 2], [a, b], color="gray", alpha=0.4, linewidth=0.8)
    ax.set_ylabel("value")
    ax.grid(True, axis="y", alpha=0.3)
    fig.savefig(file, dpi=150, bbox_inches="tight")
    plt.close(fig)
