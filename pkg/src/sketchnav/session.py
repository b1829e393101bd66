"""Session mode machine: ADD draws paths into the store, CLEAR and SEND act
only after an explicit confirmation, and a confirmed SEND drives the
store -> planner -> controller -> simulator pipeline.

Messages are plain dicts matching the wire schema; `handle_message` returns
the replies to emit. The machine itself is synchronous and deterministic; a
serving transport may take over pacing of the telemetry playback.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .drawing import DEFAULT_WAYPOINT_SPACING, DrawingSession
from .errors import (
    NothingToSendError,
    PathNotFoundError,
    PathTooShortError,
    ProtocolError,
    SketchNavError,
)
from .evaluator import Scenario, evaluate_path
from .geometry import Point2D, Pose2D
from .planner import PlannerSlot, assign_orientations, goal_pose
from .pure_pursuit import ControllerParams
from .simulator import (
    DEFAULT_DT,
    DEFAULT_TIMEOUT,
    OccupancyGrid,
    RobotState,
    Trajectory,
    run_follow,
)
from .store import PathStore

TELEMETRY_PERIOD = 0.05  # s of simulated time between robot_state frames (20 Hz)


class SessionMode(str, enum.Enum):
    OFF = "OFF"
    ADD = "ADD"
    CLEAR = "CLEAR"
    SEND = "SEND"


@dataclass
class SessionConfig:
    waypoint_spacing: float = DEFAULT_WAYPOINT_SPACING
    controller: ControllerParams = field(default_factory=ControllerParams)
    dt: float = DEFAULT_DT
    timeout: float = DEFAULT_TIMEOUT
    start_pose: Optional[Pose2D] = None  # falls back to the scenario start


def _error(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


class Session:
    """Owns one store, planner slot and simulated robot.

    `defer_playback=True` leaves the telemetry frames of a confirmed SEND in
    `take_playback()` for a transport to pace; otherwise they are returned
    inline with the other replies.
    """

    def __init__(
        self,
        store: PathStore,
        grid: Optional[OccupancyGrid] = None,
        scenario: Optional[Scenario] = None,
        config: Optional[SessionConfig] = None,
        defer_playback: bool = False,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.store = store
        self.grid = grid
        self.scenario = scenario
        self.config = config or SessionConfig()
        self.defer_playback = defer_playback
        self.clock = clock

        self.mode = SessionMode.OFF
        self.drawing: Optional[DrawingSession] = None
        self.pending_confirmation: Optional[SessionMode] = None
        self.selected_path_id: Optional[str] = None
        self.slot = PlannerSlot()
        self.run_active = False
        self.last_trajectory: Optional[Trajectory] = None
        self._playback: list[dict] = []

        self.drawing_attempts = 0
        self.send_elapsed: Optional[float] = None
        self._mark = self.clock()

        if self.config.start_pose is not None:
            self.robot_pose = self.config.start_pose
        elif scenario is not None:
            self.robot_pose = scenario.start_pose
        else:
            self.robot_pose = Pose2D(Point2D(0.0, 0.0), 0.0)

    # -- outgoing message builders ------------------------------------------

    def mode_message(self) -> dict:
        return {
            "type": "mode",
            "mode": self.mode.value,
            "confirm_required": self.pending_confirmation is not None,
        }

    def paths_message(self) -> dict:
        """All stored paths in map-frame coordinates, goal pin on the last waypoint."""
        anchor = self.store.db.anchor
        entries = []
        for p in self.store.db.paths:
            pts = anchor.apply_all(p.points)
            entries.append(
                {
                    "id": p.id,
                    "created_at": p.created_at.isoformat(),
                    "points": [[q.x, q.y] for q in pts],
                    "goal": [pts[-1].x, pts[-1].y],
                }
            )
        return {"type": "paths", "paths": entries}

    def counters(self) -> dict:
        return {
            "drawing_attempts": self.drawing_attempts,
            "elapsed_s": self.send_elapsed,
        }

    def reset_counters(self) -> None:
        self.drawing_attempts = 0
        self.send_elapsed = None
        self._mark = self.clock()

    def snapshot_messages(self) -> list[dict]:
        """What a newly connected client needs to render the current state."""
        messages = [self.mode_message(), self.paths_message()]
        if self.grid is not None:
            geo = self.grid.geometry
            iy, ix = self.grid.cells.nonzero()
            messages.append(
                {
                    "type": "map",
                    "resolution": geo.resolution,
                    "width": geo.width,
                    "height": geo.height,
                    "origin": [geo.origin.x, geo.origin.y, geo.origin.theta],
                    "occupied": [[int(x), int(y)] for x, y in zip(ix, iy)],
                }
            )
        if self.scenario is not None:
            scn = self.scenario
            messages.append(
                {
                    "type": "scenario",
                    "name": scn.name,
                    "centerline": [[p.x, p.y] for p in scn.tape_centerline],
                    "tape_width": scn.tape_width,
                    "robot_radius": scn.robot_radius,
                    "start": [scn.start_pose.x, scn.start_pose.y, scn.start_pose.theta],
                }
            )
        return messages

    def take_playback(self) -> list[dict]:
        frames = self._playback
        self._playback = []
        return frames

    # -- message handling -----------------------------------------------------

    def handle_message(self, msg) -> list[dict]:
        """Apply one protocol message; returns the replies to emit.

        Store and persistence failures become error replies rather than
        exceptions, so a transport loop survives a full disk or a corrupted
        database file; the in-memory state stays consistent either way.
        """
        try:
            return self._dispatch(msg)
        except ProtocolError as exc:
            return [_error(exc.code, str(exc))]
        except SketchNavError as exc:
            return [_error("internal-error", str(exc))]

    def _dispatch(self, msg) -> list[dict]:
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            raise ProtocolError("bad-message", "messages are objects with a string 'type'")
        handler = {
            "set_mode": self._on_set_mode,
            "pinch": self._on_pinch,
            "cursor": self._on_cursor,
            "confirm": self._on_confirm,
            "select_path": self._on_select_path,
        }.get(msg["type"])
        if handler is None:
            raise ProtocolError("bad-message", f"unknown message type {msg['type']!r}")
        return handler(msg)

    def _on_set_mode(self, msg) -> list[dict]:
        try:
            mode = SessionMode(msg.get("mode"))
        except ValueError:
            raise ProtocolError("bad-message", f"unknown mode {msg.get('mode')!r}")
        self.drawing = None
        self.pending_confirmation = None
        self.mode = mode
        if mode in (SessionMode.CLEAR, SessionMode.SEND):
            self.pending_confirmation = mode
        return [self.mode_message()]

    def _on_pinch(self, msg) -> list[dict]:
        state = msg.get("state")
        if state not in ("down", "up"):
            raise ProtocolError("bad-message", "pinch state must be 'down' or 'up'")
        if self.mode is not SessionMode.ADD:
            raise ProtocolError("protocol-violation", "pinch is only valid in ADD mode")
        if state == "down":
            self.drawing = DrawingSession(threshold=self.config.waypoint_spacing)
            self.drawing_attempts += 1
            return []
        if self.drawing is None:
            raise ProtocolError("protocol-violation", "pinch up without a pinch down")
        drawing, self.drawing = self.drawing, None
        try:
            path, _goal = drawing.finish()
        except PathTooShortError as exc:
            return [_error("path-too-short", str(exc))]
        self.store.add(path)
        return [self.paths_message()]

    def _on_cursor(self, msg) -> list[dict]:
        if self.mode is not SessionMode.ADD:
            raise ProtocolError("protocol-violation", "cursor is only valid in ADD mode")
        try:
            cursor_map = Point2D(float(msg["x"]), float(msg["y"]))
        except (KeyError, TypeError, ValueError):
            raise ProtocolError("bad-message", "cursor needs finite numeric x and y")
        if self.drawing is not None:
            # stored coordinates live in the drawing frame
            cursor = self.store.db.anchor.inverse().apply(cursor_map)
            self.drawing = self.drawing.feed_cursor(cursor)
        return []

    def _on_select_path(self, msg) -> list[dict]:
        path_id = msg.get("id")
        if not isinstance(path_id, str):
            raise ProtocolError("bad-message", "select_path needs a string id")
        if self.store.db.find(path_id) is None:
            raise ProtocolError("not-found", f"no stored path with id {path_id!r}")
        self.selected_path_id = path_id
        return []

    def _on_confirm(self, msg) -> list[dict]:
        value = msg.get("value")
        if not isinstance(value, bool):
            raise ProtocolError("bad-message", "confirm needs a boolean value")
        if self.pending_confirmation is None:
            raise ProtocolError("protocol-violation", "nothing awaits confirmation")
        pending, self.pending_confirmation = self.pending_confirmation, None
        self.mode = SessionMode.OFF
        if not value:
            return [self.mode_message()]
        if pending is SessionMode.CLEAR:
            self.store.clear()
            return [self.paths_message(), self.mode_message()]
        return self._execute_send()

    # -- the confirmed SEND pipeline -----------------------------------------

    def _execute_send(self) -> list[dict]:
        if self.run_active:
            return [_error("run-active", "a navigation run is already in progress")]
        try:
            coords = self.store.fetch_for_send(self.selected_path_id)
        except NothingToSendError as exc:
            return [_error("nothing-to-send", str(exc)), self.mode_message()]
        except PathNotFoundError as exc:
            return [_error("not-found", str(exc)), self.mode_message()]
        source_id = (
            self.selected_path_id
            if self.selected_path_id is not None
            else self.store.db.paths[-1].id
        )
        self.send_elapsed = self.clock() - self._mark

        path = assign_orientations(coords, source_id=source_id)
        self.slot.set_path(path)
        goal = goal_pose(path)
        plan = self.slot.create_plan(self.robot_pose, goal)
        try:
            trajectory = run_follow(
                plan,
                RobotState(self.robot_pose, 0.0),
                params=self.config.controller,
                grid=self.grid,
                dt=self.config.dt,
                timeout=self.config.timeout,
            )
        except SketchNavError as exc:
            return [_error("run-failed", str(exc)), self.mode_message()]
        self.last_trajectory = trajectory
        self.robot_pose = trajectory.final_pose

        stride = max(1, round(TELEMETRY_PERIOD / trajectory.dt))
        frames = [
            {
                "type": "robot_state",
                "t": s.t,
                "x": s.x,
                "y": s.y,
                "theta": s.theta,
                "v": s.v,
                "omega": s.omega,
            }
            for i, s in enumerate(trajectory.samples)
            if i % stride == 0 or i == len(trajectory.samples) - 1
        ]

        report = None
        if self.scenario is not None and self.grid is not None:
            report, _gt, _drawn = evaluate_path(coords, self.scenario, self.grid)
        frames.append(
            {
                "type": "result",
                "outcome": trajectory.outcome.value,
                "metrics": report.as_dict() if report is not None else None,
                "counters": self.counters(),
            }
        )

        replies: list[dict] = [self.mode_message()]
        if self.defer_playback:
            self._playback = frames
        else:
            replies.extend(frames)
        return replies
