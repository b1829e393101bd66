"""Turns a received point sequence into an oriented global path and serves the
latest path verbatim to the navigation loop."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DegeneratePathError, NoPathAvailableError
from .geometry import Point2D, Pose2D


@dataclass(frozen=True)
class GlobalPath:
    """Ordered poses in the map frame. Built so each heading points at the
    successor position (the last pose inherits its predecessor's heading)."""

    poses: tuple[Pose2D, ...]
    source_id: str = ""

    def __post_init__(self):
        if len(self.poses) < 2:
            raise DegeneratePathError("a global path needs at least 2 poses")
        for a, b in zip(self.poses, self.poses[1:]):
            if a.position == b.position:
                raise DegeneratePathError("consecutive path positions must be distinct")

    @property
    def positions(self) -> list[Point2D]:
        return [p.position for p in self.poses]


def assign_orientations(points: Sequence[Point2D], source_id: str = "") -> GlobalPath:
    """Build a global path: each point gets the heading toward its successor.

    Consecutive duplicate points are dropped first (a zero vector has no
    direction); fewer than two distinct points is a degenerate path.
    """
    distinct: list[Point2D] = []
    for p in points:
        if not distinct or p != distinct[-1]:
            distinct.append(p)
    if len(distinct) < 2:
        raise DegeneratePathError(
            f"received {len(distinct)} distinct point(s); need at least 2"
        )
    poses = []
    for a, b in zip(distinct, distinct[1:]):
        poses.append(Pose2D(a, math.atan2(b.y - a.y, b.x - a.x)))
    poses.append(Pose2D(distinct[-1], poses[-1].theta))
    return GlobalPath(poses=tuple(poses), source_id=source_id)


def goal_pose(path: GlobalPath) -> Pose2D:
    """The navigation goal: the final pose of the path."""
    return path.poses[-1]


class PlannerSlot:
    """Holds the latest converted path and returns it whenever the navigation
    loop requests a plan. The requested start/goal are accepted for interface
    compatibility and ignored; the stored path is never modified or resampled.
    """

    def __init__(self):
        self._current: Optional[GlobalPath] = None

    @property
    def current(self) -> Optional[GlobalPath]:
        return self._current

    def set_path(self, path: GlobalPath) -> None:
        # Single reference assignment: readers see the old or new path whole.
        self._current = path

    def create_plan(
        self, start: Optional[Pose2D] = None, goal: Optional[Pose2D] = None
    ) -> GlobalPath:
        if self._current is None:
            raise NoPathAvailableError("no path has been set")
        return self._current
