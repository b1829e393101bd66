/** Canvas rendering of the view state: map cells, target-course overlay,
 * stored paths with goal pins, the in-progress stroke, and the robot trail. */

import type { ViewState } from "./state.js";
import { telemetryStale } from "./state.js";
import type { ViewTransform } from "./view.js";

const COLORS = {
  background: "#fafafa",
  grid: "#e3e3e3",
  occupied: "#424242",
  tape: "rgba(220, 60, 60, 0.9)",
  corridor: "rgba(220, 60, 60, 0.15)",
  strokeRaw: "rgba(120, 120, 220, 0.35)",
  waypoint: "#2a63c9",
  goalPin: "#e6a817",
  trail: "#1da75a",
  robot: "#147a40",
};

export function render(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  state: ViewState,
  nowMs: number,
): void {
  const { canvasWidth: w, canvasHeight: h } = view;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, w, h);

  drawMap(ctx, view, state);
  drawScenario(ctx, view, state);
  drawPaths(ctx, view, state);
  drawStroke(ctx, view, state);
  drawTrail(ctx, view, state, nowMs);
}

function drawMap(ctx: CanvasRenderingContext2D, view: ViewTransform, state: ViewState): void {
  const map = state.map;
  if (!map) {
    return;
  }
  const res = map.resolution;
  const [ox, oy, otheta] = map.origin;
  const cos = Math.cos(otheta);
  const sin = Math.sin(otheta);
  ctx.fillStyle = COLORS.occupied;
  for (const [ix, iy] of map.occupied) {
    const gx = ix * res;
    const gy = iy * res;
    const corner = view.mapToScreen({
      x: cos * gx - sin * gy + ox,
      y: sin * gx + cos * gy + oy,
    });
    const size = res * view.scale;
    ctx.fillRect(corner.x, corner.y - size, size + 1, size + 1);
  }
  // grid outline
  const a = view.mapToScreen({ x: ox, y: oy });
  ctx.strokeStyle = COLORS.grid;
  ctx.strokeRect(
    a.x,
    a.y - map.height * res * view.scale,
    map.width * res * view.scale,
    map.height * res * view.scale,
  );
}

function drawScenario(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  state: ViewState,
): void {
  const scn = state.scenario;
  if (!scn || !state.showCourse) {
    return;
  }
  const halfWidth = scn.robot_radius + scn.tape_width / 2;
  // corridor band
  ctx.strokeStyle = COLORS.corridor;
  ctx.lineWidth = 2 * halfWidth * view.scale;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  strokePolyline(ctx, view, scn.centerline);
  // tape centerline
  ctx.strokeStyle = COLORS.tape;
  ctx.lineWidth = Math.max(1.5, scn.tape_width * view.scale);
  strokePolyline(ctx, view, scn.centerline);
}

function drawPaths(ctx: CanvasRenderingContext2D, view: ViewTransform, state: ViewState): void {
  for (const path of state.paths) {
    ctx.strokeStyle = COLORS.waypoint;
    ctx.lineWidth = 2;
    strokePolyline(ctx, view, path.points);
    ctx.fillStyle = COLORS.waypoint;
    for (const [x, y] of path.points) {
      const s = view.mapToScreen({ x, y });
      ctx.beginPath();
      ctx.arc(s.x, s.y, 3.5, 0, 2 * Math.PI);
      ctx.fill();
    }
    drawGoalPin(ctx, view, path.goal[0], path.goal[1]);
  }
}

function drawGoalPin(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  x: number,
  y: number,
): void {
  const s = view.mapToScreen({ x, y });
  ctx.strokeStyle = COLORS.goalPin;
  ctx.fillStyle = COLORS.goalPin;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(s.x, s.y);
  ctx.lineTo(s.x, s.y - 16);
  ctx.stroke();
  ctx.beginPath();
  ctx.arc(s.x, s.y - 18, 5, 0, 2 * Math.PI);
  ctx.fill();
}

function drawStroke(ctx: CanvasRenderingContext2D, view: ViewTransform, state: ViewState): void {
  if (state.stroke.length < 2) {
    return;
  }
  ctx.strokeStyle = COLORS.strokeRaw;
  ctx.lineWidth = 3;
  strokePolyline(
    ctx,
    view,
    state.stroke.map((p) => [p.x, p.y] as [number, number]),
  );
}

function drawTrail(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  state: ViewState,
  nowMs: number,
): void {
  if (state.trail.length === 0) {
    return;
  }
  ctx.strokeStyle = COLORS.trail;
  ctx.lineWidth = 2;
  strokePolyline(
    ctx,
    view,
    state.trail.map((f) => [f.x, f.y] as [number, number]),
  );
  const last = state.trail[state.trail.length - 1];
  const s = view.mapToScreen(last);
  ctx.fillStyle = COLORS.robot;
  ctx.beginPath();
  ctx.arc(s.x, s.y, 7, 0, 2 * Math.PI);
  ctx.fill();
  // heading tick
  ctx.strokeStyle = COLORS.robot;
  ctx.beginPath();
  ctx.moveTo(s.x, s.y);
  ctx.lineTo(s.x + 14 * Math.cos(last.theta), s.y - 14 * Math.sin(last.theta));
  ctx.stroke();
  if (telemetryStale(state, nowMs)) {
    ctx.fillStyle = "#c02020";
    ctx.font = "13px sans-serif";
    ctx.fillText("telemetry stale", s.x + 10, s.y - 10);
  }
}

function strokePolyline(
  ctx: CanvasRenderingContext2D,
  view: ViewTransform,
  points: [number, number][],
): void {
  if (points.length < 2) {
    return;
  }
  ctx.beginPath();
  const first = view.mapToScreen({ x: points[0][0], y: points[0][1] });
  ctx.moveTo(first.x, first.y);
  for (const [x, y] of points.slice(1)) {
    const s = view.mapToScreen({ x, y });
    ctx.lineTo(s.x, s.y);
  }
  ctx.stroke();
}
