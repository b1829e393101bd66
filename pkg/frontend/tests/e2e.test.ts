/** End-to-end: boots the real drawing service, then drives the real client
 * core (connection, stroke capture, state reducer) over a live WebSocket:
 * draw a stage-A stroke, confirm SEND, watch the robot, read the metrics. */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { Connection } from "../src/client.js";
import type { SocketLike } from "../src/client.js";
import { applyServerMsg, initialState, onConnected, onDisconnected } from "../src/state.js";
import { StrokeCapture } from "../src/stroke.js";
import { ViewTransform } from "../src/view.js";

const PORT = 18000 + Math.floor(Math.random() * 20000);
const WS_URL = `ws://127.0.0.1:${PORT + 1}`;

let workDir: string;
let server: ChildProcess;

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "sketchnav-e2e-"));
  const scenarioFile = join(workDir, "stageA.json");
  const emitted = spawnSync("sketchnav", ["scenario", "--stage", "A", "--out", scenarioFile]);
  expect(emitted.status).toBe(0);

  server = spawn(
    "sketchnav",
    [
      "serve",
      "--db",
      join(workDir, "db.json"),
      "--scenario",
      scenarioFile,
      "--port",
      String(PORT),
    ],
    { stdio: "ignore" },
  );
  await waitForPort(WS_URL, 15000);
}, 30000);

afterAll(() => {
  server?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

async function waitForPort(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const ok = await new Promise<boolean>((resolve) => {
      const probe = new WebSocket(url);
      probe.onopen = () => {
        probe.close();
        resolve(true);
      };
      probe.onerror = () => resolve(false);
    });
    if (ok) {
      return;
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service never came up on ${url}`);
}

describe("browser client against the live service", () => {
  it(
    "draws a stage-A stroke, confirms SEND, and watches the run to a metric panel",
    async () => {
      const state = initialState();
      const waiters: { check: () => boolean; resolve: () => void }[] = [];

      const connection = new Connection(
        WS_URL,
        {
          onMessage: (msg) => {
            applyServerMsg(state, msg, Date.now());
            for (let i = waiters.length - 1; i >= 0; i--) {
              if (waiters[i].check()) {
                waiters[i].resolve();
                waiters.splice(i, 1);
              }
            }
          },
          onOpen: () => onConnected(state),
          onClose: () => onDisconnected(state),
        },
        (url) => new WebSocket(url) as unknown as SocketLike,
        null, // no auto-reconnect in the test
      );

      function waitFor(check: () => boolean, what: string, timeoutMs = 30000): Promise<void> {
        if (check()) {
          return Promise.resolve();
        }
        return new Promise((resolve, reject) => {
          const timer = setTimeout(() => reject(new Error(`timed out waiting for ${what}`)), timeoutMs);
          waiters.push({
            check,
            resolve: () => {
              clearTimeout(timer);
              resolve();
            },
          });
        });
      }

      connection.open();
      await waitFor(() => state.scenario !== null && state.map !== null, "connect snapshot");
      expect(state.mode).toBe("OFF");

      // frame the course like the browser does, then draw along the tape
      const view = new ViewTransform(960, 640);
      const xs = state.scenario!.centerline.map((p) => p[0]);
      const ys = state.scenario!.centerline.map((p) => p[1]);
      view.fitBounds(Math.min(...xs) - 1, Math.min(...ys) - 1, Math.max(...xs) + 1, Math.max(...ys) + 1);

      const stroke = new StrokeCapture(view, state, (msg) => connection.send(msg));
      connection.send({ type: "set_mode", mode: "ADD" });
      await waitFor(() => state.mode === "ADD", "ADD mode");

      const [x0, y0] = state.scenario!.centerline[0];
      const [x1, y1] = state.scenario!.centerline[state.scenario!.centerline.length - 1];
      const start = view.mapToScreen({ x: x0, y: y0 });
      const end = view.mapToScreen({ x: x1, y: y1 });
      // integer pixels, like real pointer events
      stroke.pointerDown({ x: Math.round(start.x), y: Math.round(start.y) });
      const steps = 120;
      for (let i = 1; i <= steps; i++) {
        stroke.pointerMove({
          x: Math.round(start.x + ((end.x - start.x) * i) / steps),
          y: Math.round(start.y + ((end.y - start.y) * i) / steps),
        });
      }
      stroke.pointerUp();

      await waitFor(() => state.paths.length === 1, "paths broadcast");
      const waypoints = state.paths[0].points;
      expect(waypoints.length).toBeGreaterThan(10);
      for (let i = 1; i < waypoints.length; i++) {
        const d = Math.hypot(
          waypoints[i][0] - waypoints[i - 1][0],
          waypoints[i][1] - waypoints[i - 1][1],
        );
        expect(d).toBeGreaterThan(0.2); // server-side spacing property
      }
      expect(state.paths[0].goal).toEqual(waypoints[waypoints.length - 1]);

      connection.send({ type: "set_mode", mode: "SEND" });
      await waitFor(() => state.mode === "SEND" && state.confirmRequired, "SEND confirmation");
      connection.send({ type: "confirm", value: true });

      await waitFor(() => state.result !== null, "run result", 60000);
      expect(state.result!.outcome).toBe("reached_goal");

      // at least one robot_state frame per 100 ms of simulated time
      expect(state.trail.length).toBeGreaterThan(20);
      for (let i = 1; i < state.trail.length; i++) {
        expect(state.trail[i].t - state.trail[i - 1].t).toBeLessThanOrEqual(0.1 + 1e-9);
      }

      // metric panel for an on-tape stroke
      expect(state.result!.metrics).not.toBeNull();
      expect(state.result!.metrics!.f1!).toBeGreaterThanOrEqual(0.9);

      // every mutation this client caused went through the protocol
      const kinds = new Set(connection.sentLog.map((m) => m.type));
      expect([...kinds].sort()).toEqual(["confirm", "cursor", "pinch", "set_mode"]);

      connection.close();
    },
    90000,
  );
});
