"""Deterministic differential-drive kinematics on an occupancy grid.

The integrator is the exact constant-twist arc, so n steps of dt equal one
step of n*dt and identical inputs always produce identical trajectories.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, TextIO, Union

import numpy as np
import yaml
from PIL import Image

from .errors import InvalidStartError, MapFormatError
from .geometry import Point2D, Pose2D, normalize_angle
from .planner import GlobalPath, goal_pose
from .pure_pursuit import ControllerParams, Twist, compute_command, goal_reached

DEFAULT_DT = 0.05       # s, also the 20 Hz telemetry period
DEFAULT_TIMEOUT = 120.0  # s

OCCUPIED_BELOW = 128  # 8-bit gray threshold: darker pixels are obstacles


@dataclass(frozen=True)
class GridGeometry:
    """Discretization shared by occupancy grids and region masks.

    `origin` is the pose of the corner of cell (0, 0); cell indices grow along
    the origin frame's +x (column ix) and +y (row iy).
    """

    resolution: float
    width: int
    height: int
    origin: Pose2D = Pose2D(Point2D(0.0, 0.0), 0.0)

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must hold at least one cell")

    def world_to_cell(self, p: Point2D) -> tuple[int, int]:
        """Cell index (ix, iy) containing a world point (may be out of bounds)."""
        c = math.cos(self.origin.theta)
        s = math.sin(self.origin.theta)
        dx = p.x - self.origin.x
        dy = p.y - self.origin.y
        gx = c * dx + s * dy
        gy = -s * dx + c * dy
        return math.floor(gx / self.resolution), math.floor(gy / self.resolution)

    def cell_center(self, ix: int, iy: int) -> Point2D:
        gx = (ix + 0.5) * self.resolution
        gy = (iy + 0.5) * self.resolution
        c = math.cos(self.origin.theta)
        s = math.sin(self.origin.theta)
        return Point2D(c * gx - s * gy + self.origin.x, s * gx + c * gy + self.origin.y)

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    def contains_point(self, p: Point2D) -> bool:
        return self.in_bounds(*self.world_to_cell(p))

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """World coordinates of every cell center as (X, Y) arrays of shape
        (height, width)."""
        gx = (np.arange(self.width) + 0.5) * self.resolution
        gy = (np.arange(self.height) + 0.5) * self.resolution
        GX, GY = np.meshgrid(gx, gy)
        c = math.cos(self.origin.theta)
        s = math.sin(self.origin.theta)
        return c * GX - s * GY + self.origin.x, s * GX + c * GY + self.origin.y


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Binary occupancy over a grid; cells[iy, ix] is True where occupied."""

    geometry: GridGeometry
    cells: np.ndarray

    def __post_init__(self):
        if self.cells.shape != (self.geometry.height, self.geometry.width):
            raise ValueError("cells shape must be (height, width)")
        if self.cells.dtype != np.bool_:
            object.__setattr__(self, "cells", self.cells.astype(bool))

    @property
    def resolution(self) -> float:
        return self.geometry.resolution

    @property
    def width(self) -> int:
        return self.geometry.width

    @property
    def height(self) -> int:
        return self.geometry.height

    @property
    def origin(self) -> Pose2D:
        return self.geometry.origin

    def occupied_at(self, p: Point2D) -> bool:
        """True when the point's cell is occupied; out-of-grid counts as free."""
        ix, iy = self.geometry.world_to_cell(p)
        if not self.geometry.in_bounds(ix, iy):
            return False
        return bool(self.cells[iy, ix])

    @classmethod
    def empty(cls, geometry: GridGeometry) -> "OccupancyGrid":
        return cls(geometry, np.zeros((geometry.height, geometry.width), dtype=bool))


def load_map(metadata_file: Union[str, Path], image_file: Union[str, Path, None] = None) -> OccupancyGrid:
    """Load an occupancy grid from a metadata file plus an 8-bit gray image.

    Metadata is `key: value` text with keys resolution, origin_x, origin_y,
    origin_theta and image (the image path, relative to the metadata file).
    Pixel values below 128 are occupied; image pixel (column, row) maps
    straight to cell (ix, iy). Optional width/height entries must agree with
    the image.
    """
    metadata_file = Path(metadata_file)
    try:
        meta = yaml.safe_load(metadata_file.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise MapFormatError(f"could not read map metadata {metadata_file}: {exc}") from exc
    if not isinstance(meta, dict):
        raise MapFormatError("map metadata must be key: value lines")
    try:
        resolution = float(meta["resolution"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MapFormatError("map metadata needs a numeric 'resolution'") from exc
    origin = Pose2D(
        Point2D(float(meta.get("origin_x", 0.0)), float(meta.get("origin_y", 0.0))),
        float(meta.get("origin_theta", 0.0)),
    )
    if image_file is None:
        if "image" not in meta:
            raise MapFormatError("map metadata names no image and none was given")
        image_file = metadata_file.parent / str(meta["image"])
    try:
        with Image.open(image_file) as img:
            gray = np.asarray(img.convert("L"))
    except (OSError, ValueError) as exc:
        raise MapFormatError(f"could not read map image {image_file}: {exc}") from exc
    height, width = gray.shape
    for key, actual in (("width", width), ("height", height)):
        if key in meta and int(meta[key]) != actual:
            raise MapFormatError(
                f"metadata {key}={meta[key]} disagrees with image {key}={actual}"
            )
    geometry = GridGeometry(resolution=resolution, width=width, height=height, origin=origin)
    return OccupancyGrid(geometry, gray < OCCUPIED_BELOW)


@dataclass(frozen=True)
class RobotState:
    """Simulated robot pose at a time."""

    pose: Pose2D
    t: float = 0.0


class Outcome(str, enum.Enum):
    REACHED_GOAL = "reached_goal"
    COLLISION = "collision"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class TrajectorySample:
    """One control period: the state and the command applied from it."""

    t: float
    x: float
    y: float
    theta: float
    v: float
    omega: float


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[TrajectorySample, ...]
    outcome: Outcome
    dt: float

    @property
    def final_pose(self) -> Pose2D:
        s = self.samples[-1]
        return Pose2D(Point2D(s.x, s.y), s.theta)

    @property
    def positions(self) -> list[Point2D]:
        return [Point2D(s.x, s.y) for s in self.samples]

    def write_csv(self, target: Union[str, Path, TextIO]) -> None:
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8", newline="") as fh:
                self.write_csv(fh)
            return
        writer = csv.writer(target)
        writer.writerow(["t", "x", "y", "theta", "v", "omega"])
        for s in self.samples:
            writer.writerow([repr(s.t), repr(s.x), repr(s.y), repr(s.theta), repr(s.v), repr(s.omega)])


def step(state: RobotState, twist: Twist, dt: float) -> RobotState:
    """Advance one constant-twist period with the exact arc solution."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x, y, theta = state.pose.x, state.pose.y, state.pose.theta
    v, w = twist.v, twist.omega
    if abs(w) < 1e-9:
        x += v * math.cos(theta) * dt
        y += v * math.sin(theta) * dt
    else:
        x += (v / w) * (math.sin(theta + w * dt) - math.sin(theta))
        y -= (v / w) * (math.cos(theta + w * dt) - math.cos(theta))
    return RobotState(Pose2D(Point2D(x, y), normalize_angle(theta + w * dt)), state.t + dt)


def run_follow(
    path: GlobalPath,
    start: RobotState,
    params: Optional[ControllerParams] = None,
    grid: Optional[OccupancyGrid] = None,
    dt: float = DEFAULT_DT,
    timeout: float = DEFAULT_TIMEOUT,
) -> Trajectory:
    """Follow a path from a start state until the goal, a collision, or timeout.

    Each period runs the pure pursuit command from the current state and
    integrates it for dt; every visited state is recorded (the terminal state
    with a zero command). Collision means the robot center entered an
    occupied cell.
    """
    if params is None:
        params = ControllerParams()
    if grid is not None and grid.occupied_at(start.pose.position):
        raise InvalidStartError("start pose lies in an occupied cell")

    goal = goal_pose(path)
    samples: list[TrajectorySample] = []
    state = start

    def record(s: RobotState, v: float, w: float) -> None:
        samples.append(TrajectorySample(s.t, s.pose.x, s.pose.y, s.pose.theta, v, w))

    while True:
        if goal_reached(state.pose, goal, params):
            record(state, 0.0, 0.0)
            return Trajectory(tuple(samples), Outcome.REACHED_GOAL, dt)
        if state.t - start.t > timeout:
            record(state, 0.0, 0.0)
            return Trajectory(tuple(samples), Outcome.TIMEOUT, dt)
        cmd = compute_command(path, state.pose, params)
        record(state, cmd.v, cmd.omega)
        state = step(state, cmd, dt)
        if grid is not None and grid.occupied_at(state.pose.position):
            record(state, 0.0, 0.0)
            return Trajectory(tuple(samples), Outcome.COLLISION, dt)


def cross_track_errors(trajectory: Trajectory, reference: Sequence[Point2D]) -> list[float]:
    """Perpendicular distance from each trajectory sample to a reference polyline."""
    out = []
    for p in trajectory.positions:
        best = math.inf
        for a, b in zip(reference, reference[1:]):
            dx = b.x - a.x
            dy = b.y - a.y
            seg2 = dx * dx + dy * dy
            if seg2 == 0.0:
                d = p.distance_to(a)
            else:
                t = max(0.0, min(1.0, ((p.x - a.x) * dx + (p.y - a.y) * dy) / seg2))
                d = math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))
            best = min(best, d)
        out.append(best)
    return out
