/** Entry point: wire the connection, state, canvas and panel together. */

import { Connection } from "./client.js";
import { Panel } from "./panel.js";
import { render } from "./render.js";
import {
  applyServerMsg,
  initialState,
  onConnected,
  onDisconnected,
} from "./state.js";
import { StrokeCapture } from "./stroke.js";
import { ViewTransform } from "./view.js";

const params = new URLSearchParams(window.location.search);
const wsUrl =
  params.get("server") ?? `ws://${window.location.hostname || "127.0.0.1"}:8766`;

const canvas = document.getElementById("map") as HTMLCanvasElement;
const panelRoot = document.getElementById("panel") as HTMLElement;
const ctx = canvas.getContext("2d")!;

const view = new ViewTransform(canvas.width, canvas.height);
const state = initialState();
let fitted = false;

const connection = new Connection(wsUrl, {
  onMessage: (msg) => {
    applyServerMsg(state, msg, performance.now());
    if (!fitted && (msg.type === "map" || msg.type === "scenario")) {
      fitToContent();
      fitted = true;
    }
    panel.update(state);
  },
  onOpen: () => {
    onConnected(state);
    panel.update(state);
  },
  onClose: () => {
    stroke.abort();
    onDisconnected(state);
    panel.update(state);
  },
});

const panel = new Panel(panelRoot, (msg) => connection.send(msg));
const stroke = new StrokeCapture(view, state, (msg) => connection.send(msg));

function fitToContent(): void {
  if (state.map) {
    const [ox, oy] = state.map.origin;
    view.fitBounds(
      ox,
      oy,
      ox + state.map.width * state.map.resolution,
      oy + state.map.height * state.map.resolution,
    );
  } else if (state.scenario) {
    const xs = state.scenario.centerline.map((p) => p[0]);
    const ys = state.scenario.centerline.map((p) => p[1]);
    view.fitBounds(
      Math.min(...xs) - 1,
      Math.min(...ys) - 1,
      Math.max(...xs) + 1,
      Math.max(...ys) + 1,
    );
  }
}

function canvasPoint(ev: PointerEvent | WheelEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

let panning = false;
let panLast = { x: 0, y: 0 };

canvas.addEventListener("pointerdown", (ev) => {
  const p = canvasPoint(ev);
  if (state.mode === "ADD" && ev.button === 0) {
    stroke.pointerDown(p);
  } else {
    panning = true;
    panLast = p;
  }
  canvas.setPointerCapture(ev.pointerId);
});

canvas.addEventListener("pointermove", (ev) => {
  const p = canvasPoint(ev);
  if (stroke.active) {
    stroke.pointerMove(p);
  } else if (panning) {
    view.panBy(p.x - panLast.x, p.y - panLast.y);
    panLast = p;
  }
});

canvas.addEventListener("pointerup", (ev) => {
  stroke.pointerUp();
  panning = false;
  canvas.releasePointerCapture(ev.pointerId);
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  view.zoomAt(canvasPoint(ev), ev.deltaY < 0 ? 1.15 : 1 / 1.15);
});

function frame(): void {
  render(ctx, view, state, performance.now());
  panel.update(state);
  requestAnimationFrame(frame);
}

connection.open();
requestAnimationFrame(frame);
