import { describe, expect, it } from "vitest";

import { ViewTransform } from "../src/view.js";

describe("view transform", () => {
  it("round-trips screen -> map -> screen within half a pixel at 3 zoom levels", () => {
    const view = new ViewTransform(960, 640);
    view.centerX = 2.0;
    view.centerY = 0.7;
    for (const scale of [20, 80, 320]) {
      view.scale = scale;
      for (let i = 0; i < 200; i++) {
        const p = { x: (i * 157) % 960, y: (i * 83) % 640 };
        const back = view.mapToScreen(view.screenToMap(p));
        const err = Math.hypot(back.x - p.x, back.y - p.y);
        expect(err).toBeLessThan(0.5);
      }
    }
  });

  it("round-trips map -> screen -> map", () => {
    const view = new ViewTransform(800, 600);
    view.scale = 120;
    view.centerX = -3;
    view.centerY = 9;
    const p = { x: 1.234, y: -0.521 };
    const back = view.screenToMap(view.mapToScreen(p));
    expect(back.x).toBeCloseTo(p.x, 9);
    expect(back.y).toBeCloseTo(p.y, 9);
  });

  it("flips the y axis (map up is screen up)", () => {
    const view = new ViewTransform(400, 400);
    const low = view.mapToScreen({ x: 0, y: 0 });
    const high = view.mapToScreen({ x: 0, y: 1 });
    expect(high.y).toBeLessThan(low.y);
  });

  it("zoomAt keeps the anchor point fixed", () => {
    const view = new ViewTransform(960, 640);
    view.scale = 50;
    const anchor = { x: 700, y: 100 };
    const before = view.screenToMap(anchor);
    view.zoomAt(anchor, 2.0);
    const after = view.screenToMap(anchor);
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
    expect(view.scale).toBe(100);
  });

  it("panBy shifts the view by screen pixels", () => {
    const view = new ViewTransform(960, 640);
    view.scale = 100;
    const before = view.mapToScreen({ x: 0, y: 0 });
    view.panBy(50, -30);
    const after = view.mapToScreen({ x: 0, y: 0 });
    expect(after.x - before.x).toBeCloseTo(50, 9);
    expect(after.y - before.y).toBeCloseTo(-30, 9);
  });

  it("fitBounds brings the whole box on screen", () => {
    const view = new ViewTransform(960, 640);
    view.fitBounds(0, 0, 4, 1);
    for (const corner of [
      { x: 0, y: 0 },
      { x: 4, y: 0 },
      { x: 0, y: 1 },
      { x: 4, y: 1 },
    ]) {
      const s = view.mapToScreen(corner);
      expect(s.x).toBeGreaterThanOrEqual(0);
      expect(s.x).toBeLessThanOrEqual(960);
      expect(s.y).toBeGreaterThanOrEqual(0);
      expect(s.y).toBeLessThanOrEqual(640);
    }
  });
});
