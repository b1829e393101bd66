/** Stroke capture: pointer events become pinch/cursor protocol messages.
 *
 * Pointer-down stands in for pinch-down, movement streams cursor samples in
 * map coordinates through the view transform, pointer-up finishes the stroke.
 * Nothing is sent outside ADD mode; waypoint spacing is the server's job.
 */

import type { ClientMsg } from "./protocol.js";
import type { ViewState } from "./state.js";
import type { ScreenPoint, ViewTransform } from "./view.js";

export class StrokeCapture {
  private down = false;

  constructor(
    private readonly view: ViewTransform,
    private readonly state: ViewState,
    private readonly send: (msg: ClientMsg) => void,
  ) {}

  get active(): boolean {
    return this.down;
  }

  pointerDown(p: ScreenPoint): void {
    if (this.state.mode !== "ADD" || !this.state.connected) {
      return;
    }
    this.down = true;
    this.state.stroke = [];
    this.send({ type: "pinch", state: "down" });
    this.pointerMove(p);
  }

  pointerMove(p: ScreenPoint): void {
    if (!this.down) {
      return;
    }
    if (this.state.mode !== "ADD") {
      // mode changed under the pointer: abandon silently
      this.down = false;
      this.state.stroke = [];
      return;
    }
    const m = this.view.screenToMap(p);
    this.state.stroke.push(m);
    this.send({ type: "cursor", x: m.x, y: m.y });
  }

  pointerUp(): void {
    if (!this.down) {
      return;
    }
    this.down = false;
    this.send({ type: "pinch", state: "up" });
    // the raw stroke stays visible until the server's paths broadcast lands
  }

  /** Connection dropped mid-stroke: nothing more can be sent. */
  abort(): void {
    this.down = false;
  }
}
