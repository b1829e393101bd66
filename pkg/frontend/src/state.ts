/** Client view state: a reducer over server messages.
 *
 * The displayed waypoints are always exactly the server's latest `paths`
 * broadcast; the client never resamples or edits them. The raw in-progress
 * stroke is client-local and drawn faintly until the server confirms.
 */

import type {
  MapMsg,
  Mode,
  ResultMsg,
  ScenarioMsg,
  ServerMsg,
  ServerPath,
} from "./protocol.js";

export const STALE_AFTER_MS = 2000;

export interface RobotFrame {
  t: number;
  x: number;
  y: number;
  theta: number;
}

export interface ViewState {
  connected: boolean;
  mode: Mode;
  confirmRequired: boolean;
  paths: ServerPath[];
  map: MapMsg | null;
  scenario: ScenarioMsg | null;
  /** raw stroke being drawn right now, map coordinates (client-local) */
  stroke: { x: number; y: number }[];
  /** live robot poses of the current/last run, in arrival order */
  trail: RobotFrame[];
  runActive: boolean;
  /** wall-clock ms of the last robot_state frame, for the stale indicator */
  lastFrameAtMs: number | null;
  result: ResultMsg | null;
  /** inline notice for server rejections and connection events */
  notice: string | null;
  /** target-course overlay visibility (client-local toggle) */
  showCourse: boolean;
}

export function initialState(): ViewState {
  return {
    connected: false,
    mode: "OFF",
    confirmRequired: false,
    paths: [],
    map: null,
    scenario: null,
    stroke: [],
    trail: [],
    runActive: false,
    lastFrameAtMs: null,
    result: null,
    notice: null,
    showCourse: true,
  };
}

/** Apply one server message; `nowMs` feeds the stale-telemetry clock. */
export function applyServerMsg(state: ViewState, msg: ServerMsg, nowMs: number): ViewState {
  switch (msg.type) {
    case "mode":
      state.mode = msg.mode;
      state.confirmRequired = msg.confirm_required;
      return state;
    case "paths":
      state.paths = msg.paths;
      state.stroke = [];
      return state;
    case "map":
      state.map = msg;
      return state;
    case "scenario":
      state.scenario = msg;
      return state;
    case "robot_state":
      if (!state.runActive) {
        state.trail = [];
        state.runActive = true;
        state.result = null;
      }
      state.trail.push({ t: msg.t, x: msg.x, y: msg.y, theta: msg.theta });
      state.lastFrameAtMs = nowMs;
      return state;
    case "result":
      state.result = msg;
      state.runActive = false;
      return state;
    case "error":
      state.notice = `${msg.code}: ${msg.message}`;
      return state;
  }
}

export function onConnected(state: ViewState): ViewState {
  state.connected = true;
  state.notice = null;
  return state;
}

/** A drop mid-stroke abandons the stroke and tells the user. */
export function onDisconnected(state: ViewState): ViewState {
  state.connected = false;
  state.runActive = false;
  if (state.stroke.length > 0) {
    state.stroke = [];
    state.notice = "connection lost: stroke abandoned";
  } else {
    state.notice = "connection lost";
  }
  return state;
}

/** True while a run is active but telemetry has gone quiet. */
export function telemetryStale(state: ViewState, nowMs: number): boolean {
  return (
    state.runActive &&
    state.lastFrameAtMs !== null &&
    nowMs - state.lastFrameAtMs > STALE_AFTER_MS
  );
}
