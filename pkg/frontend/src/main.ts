/**
 * Console entry point: connect to the service (host/port from URL params),
 * render snapshots, and turn keyboard/pointer input into protocol commands.
 * Commands are flushed at the snapshot rate; the view never simulates.
 */

import { DEFAULT_STEPS, InputMapper } from "./input.js";
import { renderFrame, renderGauges } from "./render.js";
import { dragAxes } from "./scene.js";
import { initialViewState } from "./state.js";
import { connectConsole } from "./ws.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? "127.0.0.1";
const port = params.get("port") ?? "8765";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const state = initialViewState();
const input = new InputMapper({ ...DEFAULT_STEPS });

const link = connectConsole(`ws://${host}:${port}`, {
  onStatus(status) {
    state.status = status;
    const el = document.getElementById("status");
    if (el) {
      el.textContent = status;
      el.className = `gauge ${status === "open" ? "ok" : "bad"}`;
    }
  },
  onMessage(msg) {
    if (msg.type === "error") {
      state.lastError = msg.message;
      const el = document.getElementById("error");
      if (el) el.textContent = msg.message;
      return;
    }
    state.snapshot = msg;
    // rate limit: at most one command per received snapshot
    const cmd = input.flush();
    if (cmd) link.send(cmd);
  },
  onBadFrame() {
    state.lastError = "malformed frame from server";
  },
});

window.addEventListener("keydown", (ev) => {
  if (ev.repeat && (ev.key === "c" || ev.key === "g")) return; // toggles fire once
  if (input.key(ev.key)) ev.preventDefault();
  const clutchEl = document.getElementById("clutch");
  if (clutchEl) {
    clutchEl.textContent = input.clutch ? "engaged" : "released";
    clutchEl.className = `gauge ${input.clutch ? "ok" : ""}`;
  }
  const gripEl = document.getElementById("grip");
  if (gripEl) gripEl.textContent = input.gripper >= 0.5 ? "closed" : "open";
});

let dragging: { x: number; y: number; view: "top" | "side" } | null = null;
canvas.addEventListener("pointerdown", (ev) => {
  state.mode = "pointer";
  dragging = { x: ev.offsetX, y: ev.offsetY, view: ev.offsetX < canvas.width / 2 ? "top" : "side" };
});
canvas.addEventListener("pointerup", () => {
  dragging = null;
  state.mode = "keyboard";
});
canvas.addEventListener("pointermove", (ev) => {
  if (!dragging || !state.snapshot) return;
  const metersPerPixel = 0.002;
  const { axisX, axisY } = dragAxes(dragging.view);
  input.drag(
    axisX,
    axisY,
    (ev.offsetX - dragging.x) * metersPerPixel,
    -(ev.offsetY - dragging.y) * metersPerPixel
  );
  dragging.x = ev.offsetX;
  dragging.y = ev.offsetY;
});

function frame() {
  if (state.snapshot) {
    renderFrame(canvas, state.snapshot);
    renderGauges(document, state.snapshot);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
