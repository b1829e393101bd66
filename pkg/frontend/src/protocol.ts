/** Wire messages shared with the drawing service (one JSON object per frame). */

export type Mode = "OFF" | "ADD" | "CLEAR" | "SEND";

export interface SetModeMsg {
  type: "set_mode";
  mode: Mode;
}

export interface PinchMsg {
  type: "pinch";
  state: "down" | "up";
}

export interface CursorMsg {
  type: "cursor";
  x: number;
  y: number;
}

export interface ConfirmMsg {
  type: "confirm";
  value: boolean;
}

export interface SelectPathMsg {
  type: "select_path";
  id: string;
}

export type ClientMsg = SetModeMsg | PinchMsg | CursorMsg | ConfirmMsg | SelectPathMsg;

export interface ModeMsg {
  type: "mode";
  mode: Mode;
  confirm_required: boolean;
}

export interface ServerPath {
  id: string;
  created_at: string;
  points: [number, number][];
  goal: [number, number];
}

export interface PathsMsg {
  type: "paths";
  paths: ServerPath[];
}

export interface MapMsg {
  type: "map";
  resolution: number;
  width: number;
  height: number;
  origin: [number, number, number];
  occupied: [number, number][];
}

export interface ScenarioMsg {
  type: "scenario";
  name: string;
  centerline: [number, number][];
  tape_width: number;
  robot_radius: number;
  start: [number, number, number];
}

export interface RobotStateMsg {
  type: "robot_state";
  t: number;
  x: number;
  y: number;
  theta: number;
  v: number;
  omega: number;
}

export interface ResultMsg {
  type: "result";
  outcome: string;
  metrics: Record<string, number | null> | null;
  counters: { drawing_attempts: number; elapsed_s: number | null };
}

export interface ErrorMsg {
  type: "error";
  code: string;
  message: string;
}

export type ServerMsg =
  | ModeMsg
  | PathsMsg
  | MapMsg
  | ScenarioMsg
  | RobotStateMsg
  | ResultMsg
  | ErrorMsg;

const SERVER_TYPES = new Set([
  "mode",
  "paths",
  "map",
  "scenario",
  "robot_state",
  "result",
  "error",
]);

export function encode(msg: ClientMsg): string {
  return JSON.stringify(msg);
}

/** Parse one frame from the server; returns null for anything malformed. */
export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (
    typeof data !== "object" ||
    data === null ||
    typeof (data as { type?: unknown }).type !== "string"
  ) {
    return null;
  }
  const msg = data as { type: string };
  return SERVER_TYPES.has(msg.type) ? (msg as ServerMsg) : null;
}
