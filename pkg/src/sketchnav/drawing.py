"""Stroke capture: a cursor stream becomes spaced waypoints, a released stroke
becomes a stored path with a goal marker at its final waypoint."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Optional

from .errors import PathTooShortError
from .geometry import Point2D

DEFAULT_WAYPOINT_SPACING = 0.2  # meters; distance a cursor must clear to commit


@dataclass(frozen=True)
class DrawnPath:
    """A finished hand-drawn path: ordered waypoints in the drawing frame."""

    id: str
    points: tuple[Point2D, ...]
    created_at: datetime

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError("a drawn path holds at least one waypoint")
        for a, b in zip(self.points, self.points[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")

    @property
    def goal(self) -> Point2D:
        """The goal marker position: the final waypoint."""
        return self.points[-1]


@dataclass(frozen=True)
class DrawingSession:
    """Waypoints accumulated while a pinch (or pointer press) is held.

    A cursor sample is committed only when it is strictly farther than
    `threshold` from the last committed waypoint; the first sample after
    pinch-down is committed unconditionally. Cursor jumps larger than the
    threshold commit the raw cursor position, not a point interpolated onto
    the threshold circle.
    """

    threshold: float = DEFAULT_WAYPOINT_SPACING
    committed: tuple[Point2D, ...] = ()
    pinch_active: bool = True

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")

    def feed_cursor(self, cursor: Point2D) -> "DrawingSession":
        """Return the session after one cursor sample; unchanged if the sample
        did not clear the spacing threshold."""
        if not self.pinch_active:
            raise ValueError("cursor fed to a released drawing session")
        if not self.committed:
            return replace(self, committed=(cursor,))
        if cursor.distance_to(self.committed[-1]) > self.threshold:
            return replace(self, committed=self.committed + (cursor,))
        return self

    def finish(
        self,
        path_id: Optional[str] = None,
        created_at: Optional[datetime] = None,
    ) -> tuple[DrawnPath, Point2D]:
        """Release the stroke: return the finished path and its goal marker.

        Raises PathTooShortError when fewer than two waypoints were committed.
        """
        if len(self.committed) < 2:
            raise PathTooShortError(
                f"stroke committed {len(self.committed)} waypoint(s); need at least 2"
            )
        path = DrawnPath(
            id=path_id if path_id is not None else uuid.uuid4().hex,
            points=self.committed,
            created_at=created_at if created_at is not None else datetime.now(timezone.utc),
        )
        return path, path.goal
