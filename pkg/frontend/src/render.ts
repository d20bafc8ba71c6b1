/**
 * Canvas line drawing for the dual orthographic views: arm skeletons, the
 * object, the closest-approach witness segment (colored against d_thr), and
 * the alignment cone around the right tool axis.
 */

import { gaugesFrom } from "./gauges.js";
import type { Snapshot, Vec3 } from "./protocol.js";
import { Viewport, fitViewport, project } from "./scene.js";

const COLORS = {
  left: "#4fc3f7",
  right: "#ffb74d",
  object: "#81c784",
  ok: "#66bb6a",
  bad: "#ef5350",
  cone: "#b39ddb",
  grid: "#2a2a2a",
  text: "#e0e0e0",
};

function polyline(ctx: CanvasRenderingContext2D, vp: Viewport, pts: Vec3[], color: string) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  pts.forEach((p, i) => {
    const [x, y] = project(vp, p);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

function segment(
  ctx: CanvasRenderingContext2D,
  vp: Viewport,
  a: Vec3,
  b: Vec3,
  color: string,
  width = 2,
  dash: number[] = []
) {
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.setLineDash(dash);
  ctx.beginPath();
  const [ax, ay] = project(vp, a);
  const [bx, by] = project(vp, b);
  ctx.moveTo(ax, ay);
  ctx.lineTo(bx, by);
  ctx.stroke();
  ctx.setLineDash([]);
}

function toolAxis(points: Vec3[]): Vec3 {
  const a = points[points.length - 2];
  const b = points[points.length - 1];
  const d: Vec3 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
  const n = Math.hypot(...d) || 1;
  return [d[0] / n, d[1] / n, d[2] / n];
}

function drawCone(ctx: CanvasRenderingContext2D, vp: Viewport, snapshot: Snapshot) {
  // alignment cone: half-angle delta_tor about the right tool axis, tip at the tool
  const pts = snapshot.arms.right.points;
  const tip = pts[pts.length - 1];
  const axis = toolAxis(pts);
  const half = (snapshot.gates.delta_tor_deg * Math.PI) / 180;
  const len = 0.12;
  // spread the cone edges in this view's plane
  const [ux, uy] = project(vp, tip);
  const [vx, vy] = project(vp, [tip[0] + axis[0] * len, tip[1] + axis[1] * len, tip[2] + axis[2] * len]);
  const dx = vx - ux;
  const dy = vy - uy;
  for (const sign of [-1, 1]) {
    const c = Math.cos(sign * half);
    const s = Math.sin(sign * half);
    ctx.strokeStyle = COLORS.cone;
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(ux, uy);
    ctx.lineTo(ux + dx * c - dy * s, uy + dx * s + dy * c);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

function drawView(ctx: CanvasRenderingContext2D, vp: Viewport, snapshot: Snapshot, label: string) {
  ctx.strokeStyle = COLORS.grid;
  ctx.strokeRect(vp.x, vp.y, vp.width, vp.height);
  ctx.fillStyle = COLORS.text;
  ctx.font = "12px monospace";
  ctx.fillText(label, vp.x + 8, vp.y + 16);

  polyline(ctx, vp, snapshot.arms.left.points, COLORS.left);
  polyline(ctx, vp, snapshot.arms.right.points, COLORS.right);
  segment(ctx, vp, snapshot.object.p1, snapshot.object.p2, COLORS.object, 4);
  const safe = snapshot.metrics.d_min >= snapshot.gates.d_thr;
  segment(
    ctx,
    vp,
    snapshot.metrics.witness_left,
    snapshot.metrics.witness_right,
    safe ? COLORS.ok : COLORS.bad,
    1,
    [6, 3]
  );
  drawCone(ctx, vp, snapshot);
}

export function renderFrame(canvas: HTMLCanvasElement, snapshot: Snapshot) {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.fillStyle = "#121212";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const everything: Vec3[] = [
    ...snapshot.arms.left.points,
    ...snapshot.arms.right.points,
    snapshot.object.p1,
    snapshot.object.p2,
  ];
  const half = canvas.width / 2;
  const pad = 10;
  const rectTop = { x: pad, y: pad, width: half - 2 * pad, height: canvas.height - 2 * pad };
  const rectSide = {
    x: half + pad,
    y: pad,
    width: half - 2 * pad,
    height: canvas.height - 2 * pad,
  };
  drawView(ctx, fitViewport("top", rectTop, everything), snapshot, "top (x up, y right)");
  drawView(ctx, fitViewport("side", rectSide, everything), snapshot, "side (z up, x right)");
}

/** Update the gauge panel; ids match index.html. */
export function renderGauges(doc: Document, snapshot: Snapshot) {
  const g = gaugesFrom(snapshot);
  const set = (id: string, text: string) => {
    const el = doc.getElementById(id);
    if (el) el.textContent = text;
  };
  const mark = (id: string, ok: boolean) => {
    const el = doc.getElementById(id);
    if (el) el.className = ok ? "gauge ok" : "gauge bad";
  };
  set("phase", g.phase);
  set("tick", String(g.tick));
  set("delta", `${g.deltaDeg.toFixed(2)} deg`);
  mark("delta-box", g.deltaOk);
  set("dmin", `${g.dMin.toFixed(4)} m`);
  mark("dmin-box", g.dMinOk);
  set("theta", `${g.thetaT.toFixed(1)} / ${g.thetaGoal.toFixed(0)} deg`);
  set("mleft", g.mLeft.toFixed(3));
  set("mright", g.mRight.toFixed(3));
  set("fm", g.fM === null ? "inf" : g.fM.toFixed(3));
  set("verdict", g.verdict || "-");
  const banner = doc.getElementById("banner");
  if (banner) {
    banner.textContent = g.phase === "Aborted" ? `ABORTED: ${g.abortReason}` : g.phase;
    banner.className = `banner ${g.phase.toLowerCase()}`;
  }
}
