"""Path-fidelity measurement: target-corridor masks, coverage, and pixel-wise
confusion metrics, plus the built-in staged test courses.

The ground-truth (GT) region is the set of valid robot-center cells: every
cell whose center lies within robot_radius + tape_width/2 of the taped
centerline. A drawn path is expanded to the same width before the comparison,
and every cell of the grid is classified as TP/FP/FN/TN.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import GridMismatchError, OutOfBoundsError
from .geometry import Point2D, Pose2D, polyline_length, resample_uniform
from .simulator import GridGeometry, OccupancyGrid

DEFAULT_TAPE_WIDTH = 0.05   # m, width of the floor tape
DEFAULT_ROBOT_RADIUS = 0.25  # m, dilation radius for valid robot centers


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Binary cell membership over a grid geometry."""

    geometry: GridGeometry
    cells: np.ndarray

    def __post_init__(self):
        if self.cells.shape != (self.geometry.height, self.geometry.width):
            raise ValueError("cells shape must be (height, width)")
        if self.cells.dtype != np.bool_:
            object.__setattr__(self, "cells", self.cells.astype(bool))

    @property
    def count(self) -> int:
        return int(self.cells.sum())

    def contains(self, p: Point2D) -> bool:
        ix, iy = self.geometry.world_to_cell(p)
        if not self.geometry.in_bounds(ix, iy):
            return False
        return bool(self.cells[iy, ix])


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricReport:
    """Confusion-derived fractions; None marks an undefined denominator."""

    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    specificity: Optional[float]
    f1: Optional[float]
    pct_within_gt: Optional[float] = None

    def rows(self) -> list[tuple[str, Optional[float]]]:
        return [
            ("accuracy", self.accuracy),
            ("precision", self.precision),
            ("recall", self.recall),
            ("specificity", self.specificity),
            ("f1", self.f1),
            ("pct_within_gt", self.pct_within_gt),
        ]

    def as_dict(self) -> dict:
        return {name: value for name, value in self.rows()}


@dataclass(frozen=True)
class Scenario:
    """A staged course: a taped centerline on the floor plus the robot size."""

    name: str
    tape_centerline: tuple[Point2D, ...]
    start_pose: Pose2D
    tape_width: float = DEFAULT_TAPE_WIDTH
    robot_radius: float = DEFAULT_ROBOT_RADIUS

    def __post_init__(self):
        if len(self.tape_centerline) < 2 or polyline_length(self.tape_centerline) <= 0:
            raise ValueError("tape centerline must have positive length")
        if self.tape_width < 0 or self.robot_radius < 0:
            raise ValueError("tape width and robot radius must be non-negative")

    @property
    def gt_half_width(self) -> float:
        """Half-width of the valid-center corridor around the centerline."""
        return self.robot_radius + self.tape_width / 2.0

    @property
    def gt_width(self) -> float:
        return 2.0 * self.gt_half_width


def _distance_to_polyline(X: np.ndarray, Y: np.ndarray, points: Sequence[Point2D]) -> np.ndarray:
    """Distance from each (X, Y) sample to the nearest point of the polyline."""
    best = np.full(X.shape, np.inf)
    if len(points) == 1:
        return np.hypot(X - points[0].x, Y - points[0].y)
    for a, b in zip(points, points[1:]):
        dx = b.x - a.x
        dy = b.y - a.y
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            d = np.hypot(X - a.x, Y - a.y)
        else:
            t = np.clip(((X - a.x) * dx + (Y - a.y) * dy) / seg2, 0.0, 1.0)
            d = np.hypot(X - (a.x + t * dx), Y - (a.y + t * dy))
        np.minimum(best, d, out=best)
    return best


def polyline_region(points: Sequence[Point2D], radius: float, geometry: GridGeometry) -> RegionMask:
    """Cells whose centers lie within `radius` of the polyline (inclusive)."""
    X, Y = geometry.cell_centers()
    return RegionMask(geometry, _distance_to_polyline(X, Y, points) <= radius)


def build_gt_region(scenario: Scenario, grid: Union[OccupancyGrid, GridGeometry]) -> RegionMask:
    """The valid-robot-center region: the tape dilated by the robot radius.

    The centerline must stay inside the grid.
    """
    geometry = grid.geometry if isinstance(grid, OccupancyGrid) else grid
    for p in scenario.tape_centerline:
        if not geometry.contains_point(p):
            raise OutOfBoundsError(f"centerline point ({p.x}, {p.y}) is outside the grid")
    return polyline_region(scenario.tape_centerline, scenario.gt_half_width, geometry)


def rasterize_drawn(
    points_map_frame: Sequence[Point2D],
    gt_width: float,
    grid: Union[OccupancyGrid, GridGeometry],
) -> RegionMask:
    """Expand a drawn path to the GT width and rasterize it on the grid."""
    if len(points_map_frame) < 2:
        raise ValueError("a drawn path needs at least 2 points")
    geometry = grid.geometry if isinstance(grid, OccupancyGrid) else grid
    return polyline_region(points_map_frame, gt_width / 2.0, geometry)


def pct_within_gt(points_map_frame: Sequence[Point2D], gt_mask: RegionMask) -> float:
    """Arc-length fraction of a drawn path lying inside the GT region.

    The path is resampled at half the cell resolution with an equal spacing
    that divides the total length exactly, making the fraction invariant
    under point-order reversal.
    """
    if len(points_map_frame) < 2:
        raise ValueError("a drawn path needs at least 2 points")
    length = polyline_length(points_map_frame)
    target_step = gt_mask.geometry.resolution / 2.0
    if length == 0.0:
        return 1.0 if gt_mask.contains(points_map_frame[0]) else 0.0
    pieces = max(1, math.ceil(length / target_step))
    samples = resample_uniform(points_map_frame, length / pieces)
    inside = sum(1 for p in samples if gt_mask.contains(p))
    return inside / len(samples)


def confusion(gt_mask: RegionMask, drawn_mask: RegionMask) -> ConfusionCounts:
    """Classify every grid cell against the GT and drawn regions."""
    if gt_mask.geometry != drawn_mask.geometry:
        raise GridMismatchError("masks must share one grid geometry")
    gt = gt_mask.cells
    drawn = drawn_mask.cells
    return ConfusionCounts(
        tp=int(np.count_nonzero(gt & drawn)),
        fp=int(np.count_nonzero(~gt & drawn)),
        fn=int(np.count_nonzero(gt & ~drawn)),
        tn=int(np.count_nonzero(~gt & ~drawn)),
    )


def metrics(counts: ConfusionCounts, pct: Optional[float] = None) -> MetricReport:
    """Accuracy, precision, recall, specificity and F1 from cell counts.

    A zero denominator yields None rather than a silent 0; F1 needs both
    precision and recall defined and not jointly zero.
    """
    tp, fp, fn, tn = counts.tp, counts.fp, counts.fn, counts.tn
    total = counts.total

    def ratio(num: int, den: int) -> Optional[float]:
        return num / den if den > 0 else None

    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricReport(
        accuracy=ratio(tp + tn, total),
        precision=precision,
        recall=recall,
        specificity=ratio(tn, tn + fp),
        f1=f1,
        pct_within_gt=pct,
    )


def evaluate_path(
    points_map_frame: Sequence[Point2D],
    scenario: Scenario,
    grid: Union[OccupancyGrid, GridGeometry],
) -> tuple[MetricReport, RegionMask, RegionMask]:
    """Full fidelity evaluation of a drawn path against a scenario.

    Returns the metric report plus the GT and drawn masks for rendering.
    """
    gt_mask = build_gt_region(scenario, grid)
    drawn_mask = rasterize_drawn(points_map_frame, scenario.gt_width, grid)
    report = metrics(
        confusion(gt_mask, drawn_mask),
        pct=pct_within_gt(points_map_frame, gt_mask),
    )
    return report, gt_mask, drawn_mask


def _turned_polyline(
    start: Point2D, headings_deg: Sequence[float], seg_length: float
) -> tuple[Point2D, ...]:
    pts = [start]
    for heading in headings_deg:
        rad = math.radians(heading)
        prev = pts[-1]
        pts.append(Point2D(prev.x + seg_length * math.cos(rad), prev.y + seg_length * math.sin(rad)))
    return tuple(pts)


def make_stage(name: str) -> Scenario:
    """Built-in courses: 'A' is a straight run, 'B' zigzags with 45-degree
    turns at every interior vertex, 'practice' is a short straight warmup."""
    if name == "A":
        centerline = (Point2D(0.0, 0.0), Point2D(4.0, 0.0))
    elif name == "B":
        centerline = _turned_polyline(Point2D(0.0, 0.0), [0.0, 45.0, 0.0, 45.0, 0.0], 1.2)
    elif name == "practice":
        centerline = (Point2D(0.0, 0.0), Point2D(2.0, 0.0))
    else:
        raise ValueError(f"unknown stage {name!r}; expected 'A', 'B' or 'practice'")
    first, second = centerline[0], centerline[1]
    heading = math.atan2(second.y - first.y, second.x - first.x)
    return Scenario(name=name, tape_centerline=centerline, start_pose=Pose2D(first, heading))


def scenario_grid(
    scenario: Scenario, resolution: float = 0.05, margin: float = 0.6
) -> OccupancyGrid:
    """An all-free grid that bounds the scenario's GT corridor with a margin."""
    pad = scenario.gt_half_width + margin
    xs = [p.x for p in scenario.tape_centerline]
    ys = [p.y for p in scenario.tape_centerline]
    min_x, max_x = min(xs) - pad, max(xs) + pad
    min_y, max_y = min(ys) - pad, max(ys) + pad
    geometry = GridGeometry(
        resolution=resolution,
        width=max(1, math.ceil((max_x - min_x) / resolution)),
        height=max(1, math.ceil((max_y - min_y) / resolution)),
        origin=Pose2D(Point2D(min_x, min_y), 0.0),
    )
    return OccupancyGrid.empty(geometry)


def save_scenario(scenario: Scenario, file: Union[str, Path]) -> None:
    doc = {
        "name": scenario.name,
        "centerline": [[p.x, p.y] for p in scenario.tape_centerline],
        "tape_width": scenario.tape_width,
        "robot_radius": scenario.robot_radius,
        "start": [scenario.start_pose.x, scenario.start_pose.y, scenario.start_pose.theta],
    }
    Path(file).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_scenario(file: Union[str, Path]) -> Scenario:
    doc = json.loads(Path(file).read_text(encoding="utf-8"))
    start = doc["start"]
    return Scenario(
        name=str(doc["name"]),
        tape_centerline=tuple(Point2D(float(x), float(y)) for x, y in doc["centerline"]),
        start_pose=Pose2D(Point2D(float(start[0]), float(start[1])), float(start[2])),
        tape_width=float(doc["tape_width"]),
        robot_radius=float(doc["robot_radius"]),
    )
