"""Planar geometry primitives: points, poses, rigid transforms, polyline ops."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

TAU = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle in radians to (-pi, pi]."""
    wrapped = math.remainder(theta, TAU)
    if wrapped <= -math.pi:
        wrapped += TAU
    return wrapped


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Point2D:
    """A point in meters in some planar frame. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _finite(self.x, "x"))
        object.__setattr__(self, "y", _finite(self.y, "y"))

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Pose2D:
    """Position plus heading; theta is wrapped to (-pi, pi] on construction."""

    position: Point2D
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(_finite(self.theta, "theta")))

    @property
    def x(self) -> float:
        return self.position.x

    @property
    def y(self) -> float:
        return self.position.y


@dataclass(frozen=True)
class AnchorTransform:
    """Rigid 2D transform taking drawing-frame coordinates into the map frame.

    The drawing frame is pinned to a physical marker at a known map pose; the
    transform is configuration, never sensed here.
    """

    translation: Point2D = Point2D(0.0, 0.0)
    rotation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rotation", _finite(self.rotation, "rotation"))

    def apply(self, p: Point2D) -> Point2D:
        """Map a drawing-frame point into the map frame: R * p + t."""
        c = math.cos(self.rotation)
        s = math.sin(self.rotation)
        return Point2D(
            c * p.x - s * p.y + self.translation.x,
            s * p.x + c * p.y + self.translation.y,
        )

    def apply_all(self, points: Sequence[Point2D]) -> list[Point2D]:
        return [self.apply(p) for p in points]

    def inverse(self) -> "AnchorTransform":
        c = math.cos(self.rotation)
        s = math.sin(self.rotation)
        tx, ty = self.translation.x, self.translation.y
        return AnchorTransform(
            translation=Point2D(-(c * tx + s * ty), s * tx - c * ty),
            rotation=-self.rotation,
        )

    def is_identity(self) -> bool:
        return self.translation == Point2D(0.0, 0.0) and self.rotation == 0.0


def polyline_length(points: Sequence[Point2D]) -> float:
    """Total arc length of a polyline with at least two vertices."""
    if len(points) < 2:
        raise ValueError("polyline needs at least 2 points")
    return sum(a.distance_to(b) for a, b in zip(points, points[1:]))


def resample_uniform(points: Sequence[Point2D], step: float) -> list[Point2D]:
    """Resample a polyline at a fixed arc-length spacing.

    Samples lie exactly on the polyline at arc lengths 0, step, 2*step, ...;
    the final vertex is always included, so the last spacing may be shorter.
    """
    if len(points) < 2:
        raise ValueError("polyline needs at least 2 points")
    if step <= 0:
        raise ValueError("step must be positive")

    out = [points[0]]
    target = step
    walked = 0.0
    for a, b in zip(points, points[1:]):
        seg_len = a.distance_to(b)
        if seg_len == 0.0:
            continue
        # 1e-12 slack keeps samples that land on a vertex from slipping to
        # the next segment through floating-point error.
        while target <= walked + seg_len + 1e-12:
            t = min((target - walked) / seg_len, 1.0)
            out.append(Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
            target += step
        walked += seg_len
    last = points[-1]
    if out[-1].distance_to(last) > 1e-12:
        out.append(last)
    return out
