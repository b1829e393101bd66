"""Pure pursuit path tracking: pick a target point a fixed lookahead distance
ahead on the path and command the arc through it."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Point2D, Pose2D, normalize_angle
from .planner import GlobalPath


@dataclass(frozen=True)
class ControllerParams:
    lookahead: float = 0.5          # m, target point distance
    cruise_speed: float = 0.3       # m/s
    goal_xy_tolerance: float = 0.1  # m, goal acceptance radius
    slowdown_distance: float = 0.5  # m, linear speed ramp near the goal
    max_angular: float = 1.5        # rad/s, command clamp

    def __post_init__(self):
        if self.lookahead <= 0 or self.cruise_speed <= 0 or self.max_angular <= 0:
            raise ValueError("lookahead, cruise_speed and max_angular must be positive")
        if self.goal_xy_tolerance <= 0:
            raise ValueError("goal_xy_tolerance must be positive")
        if self.slowdown_distance < 0:
            raise ValueError("slowdown_distance must be non-negative")
        if self.goal_xy_tolerance >= self.lookahead:
            raise ValueError("goal_xy_tolerance must be smaller than the lookahead")


@dataclass(frozen=True)
class Twist:
    """Commanded translational and angular velocity."""

    v: float
    omega: float


def local_transform(path: GlobalPath, robot: Pose2D) -> GlobalPath:
    """Express the path in the robot frame: robot at the origin facing +x."""
    c = math.cos(-robot.theta)
    s = math.sin(-robot.theta)
    poses = []
    for pose in path.poses:
        dx = pose.position.x - robot.x
        dy = pose.position.y - robot.y
        poses.append(
            Pose2D(
                Point2D(c * dx - s * dy, s * dx + c * dy),
                normalize_angle(pose.theta - robot.theta),
            )
        )
    return GlobalPath(poses=tuple(poses), source_id=path.source_id)


def _nearest_on_path(points: list[Point2D]) -> tuple[int, Point2D]:
    """Nearest point to the origin on the polyline: (segment index, point).

    A path of one segment or more is assumed; ties resolve to the earliest
    segment, keeping the walk deterministic on self-crossing paths.
    """
    best_d2 = math.inf
    best = (0, points[0])
    for i, (a, b) in enumerate(zip(points, points[1:])):
        dx = b.x - a.x
        dy = b.y - a.y
        seg2 = dx * dx + dy * dy
        t = 0.0 if seg2 == 0.0 else max(0.0, min(1.0, -(a.x * dx + a.y * dy) / seg2))
        qx = a.x + t * dx
        qy = a.y + t * dy
        d2 = qx * qx + qy * qy
        if d2 < best_d2:
            best_d2 = d2
            best = (i, Point2D(qx, qy))
    return best


def select_target(path_local: GlobalPath, lookahead: float) -> Point2D:
    """Target point for the pursuit arc, in the robot frame.

    Walks forward from the path point nearest the robot and returns the first
    point at distance >= lookahead, interpolated on its segment to exactly the
    lookahead distance when the path crosses that circle. If the remaining
    path ends nearer than the lookahead, the final point is returned.
    """
    points = path_local.positions
    seg_idx, near = _nearest_on_path(points)
    if math.hypot(near.x, near.y) >= lookahead:
        return near

    walk = [near] + points[seg_idx + 1 :]
    for a, b in zip(walk, walk[1:]):
        if math.hypot(b.x, b.y) >= lookahead:
            # forward intersection of segment a-b with the lookahead circle
            dx = b.x - a.x
            dy = b.y - a.y
            seg2 = dx * dx + dy * dy
            proj = a.x * dx + a.y * dy
            under = proj * proj - seg2 * (a.x * a.x + a.y * a.y - lookahead * lookahead)
            t = (-proj + math.sqrt(max(under, 0.0))) / seg2
            t = max(0.0, min(1.0, t))
            return Point2D(a.x + t * dx, a.y + t * dy)
    return walk[-1]


def compute_twist(
    target: Point2D, params: ControllerParams, goal_distance: float = math.inf
) -> Twist:
    """Velocity command toward a robot-frame target.

    The commanded arc passes through the target: curvature 2*y/d^2. Speed is
    the cruise speed, ramped linearly to zero inside `slowdown_distance` of
    the goal; angular velocity is clamped to +-max_angular.
    """
    d = math.hypot(target.x, target.y)
    if d <= 0.0:
        return Twist(0.0, 0.0)
    curvature = 2.0 * target.y / (d * d)
    v = params.cruise_speed
    if params.slowdown_distance > 0 and goal_distance < params.slowdown_distance:
        v *= max(goal_distance, 0.0) / params.slowdown_distance
    omega = max(-params.max_angular, min(params.max_angular, v * curvature))
    return Twist(v, omega)


def goal_reached(robot: Pose2D, goal: Pose2D, params: ControllerParams) -> bool:
    """True when the robot is within the goal acceptance radius."""
    return robot.position.distance_to(goal.position) <= params.goal_xy_tolerance


def compute_command(path: GlobalPath, robot: Pose2D, params: ControllerParams) -> Twist:
    """One full controller step: transform the path into the robot frame,
    select the lookahead target, and command the arc through it."""
    local = local_transform(path, robot)
    target = select_target(local, params.lookahead)
    goal_distance = robot.position.distance_to(path.poses[-1].position)
    return compute_twist(target, params, goal_distance=goal_distance)
