/** Mode menu, confirmation dialog and metric panel.
 *
 * The menu mirrors the server's mode broadcast; CLEAR and SEND arm a
 * confirmation dialog whose Yes/No buttons emit the confirm message. The
 * metric panel fills when a run finishes.
 */

import type { ClientMsg, Mode } from "./protocol.js";
import type { ViewState } from "./state.js";

const MODES: Mode[] = ["OFF", "ADD", "CLEAR", "SEND"];

const METRIC_ORDER = [
  "pct_within_gt",
  "precision",
  "recall",
  "f1",
  "accuracy",
  "specificity",
];

export class Panel {
  private readonly buttons = new Map<Mode, HTMLButtonElement>();
  private readonly dialog: HTMLElement;
  private readonly dialogText: HTMLElement;
  private readonly metrics: HTMLElement;
  private readonly status: HTMLElement;
  private courseToggle!: HTMLInputElement;

  constructor(
    root: HTMLElement,
    private readonly send: (msg: ClientMsg) => void,
  ) {
    const menu = document.createElement("div");
    menu.className = "mode-menu";
    for (const mode of MODES) {
      const button = document.createElement("button");
      button.textContent = mode;
      button.dataset.mode = mode;
      button.addEventListener("click", () => this.send({ type: "set_mode", mode }));
      this.buttons.set(mode, button);
      menu.appendChild(button);
    }
    root.appendChild(menu);

    this.dialog = document.createElement("div");
    this.dialog.className = "confirm-dialog hidden";
    this.dialogText = document.createElement("p");
    this.dialog.appendChild(this.dialogText);
    const yes = document.createElement("button");
    yes.textContent = "Yes";
    yes.className = "confirm-yes";
    yes.addEventListener("click", () => this.send({ type: "confirm", value: true }));
    const no = document.createElement("button");
    no.textContent = "No";
    no.className = "confirm-no";
    no.addEventListener("click", () => this.send({ type: "confirm", value: false }));
    this.dialog.append(yes, no);
    root.appendChild(this.dialog);

    const overlay = document.createElement("label");
    overlay.className = "course-toggle";
    this.courseToggle = document.createElement("input");
    this.courseToggle.type = "checkbox";
    this.courseToggle.checked = true;
    overlay.append(this.courseToggle, document.createTextNode(" show target course"));
    root.appendChild(overlay);

    this.status = document.createElement("div");
    this.status.className = "status-line";
    root.appendChild(this.status);

    this.metrics = document.createElement("dl");
    this.metrics.className = "metric-panel";
    root.appendChild(this.metrics);
  }

  update(state: ViewState): void {
    for (const [mode, button] of this.buttons) {
      button.classList.toggle("active", state.mode === mode);
    }
    state.showCourse = this.courseToggle.checked;

    const confirming = state.confirmRequired && (state.mode === "CLEAR" || state.mode === "SEND");
    this.dialog.classList.toggle("hidden", !confirming);
    if (confirming) {
      this.dialogText.textContent =
        state.mode === "CLEAR"
          ? "Delete all drawn paths?"
          : "Send the path to the robot?";
    }

    const bits: string[] = [state.connected ? "connected" : "disconnected"];
    if (state.runActive) {
      bits.push("robot running");
    }
    if (state.notice) {
      bits.push(state.notice);
    }
    this.status.textContent = bits.join(" | ");

    this.metrics.replaceChildren();
    const result = state.result;
    if (result) {
      this.addMetricRow("outcome", result.outcome);
      if (result.metrics) {
        for (const name of METRIC_ORDER) {
          const value = result.metrics[name];
          this.addMetricRow(name, value === null || value === undefined ? "n/a" : value.toFixed(3));
        }
      }
      this.addMetricRow("attempts", String(result.counters.drawing_attempts));
    }
  }

  private addMetricRow(name: string, value: string): void {
    const dt = document.createElement("dt");
    dt.textContent = name;
    const dd = document.createElement("dd");
    dd.textContent = value;
    dd.dataset.metric = name;
    this.metrics.append(dt, dd);
  }
}
