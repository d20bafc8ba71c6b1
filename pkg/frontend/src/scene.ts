/**
 * Orthographic dual-view projection: a top view (looking down, screen right
 * = +y, screen up = +x) and a side view (screen right = +x, screen up = +z).
 * Both views share one world window fitted into their canvas rectangle.
 */

import type { Vec3 } from "./protocol.js";

export type ViewKind = "top" | "side";

export interface Viewport {
  kind: ViewKind;
  x: number; // canvas px of the view rectangle
  y: number;
  width: number;
  height: number;
  center: [number, number]; // world coords at the rectangle center (u, v)
  metersPerPixel: number;
}

/** World point -> view-plane coordinates (u right, v up). */
export function planeCoords(kind: ViewKind, p: Vec3): [number, number] {
  return kind === "top" ? [p[1], p[0]] : [p[0], p[2]];
}

/** Unit world directions for one screen pixel step right / up in a view. */
export function dragAxes(kind: ViewKind): { axisX: Vec3; axisY: Vec3 } {
  return kind === "top"
    ? { axisX: [0, 1, 0], axisY: [1, 0, 0] }
    : { axisX: [1, 0, 0], axisY: [0, 0, 1] };
}

export function project(vp: Viewport, p: Vec3): [number, number] {
  const [u, v] = planeCoords(vp.kind, p);
  const px = vp.x + vp.width / 2 + (u - vp.center[0]) / vp.metersPerPixel;
  const py = vp.y + vp.height / 2 - (v - vp.center[1]) / vp.metersPerPixel;
  return [px, py];
}

/** Fit a viewport around a set of world points with a margin factor. */
export function fitViewport(
  kind: ViewKind,
  rect: { x: number; y: number; width: number; height: number },
  points: Vec3[],
  margin = 1.2
): Viewport {
  let uMin = Infinity;
  let uMax = -Infinity;
  let vMin = Infinity;
  let vMax = -Infinity;
  for (const p of points) {
    const [u, v] = planeCoords(kind, p);
    uMin = Math.min(uMin, u);
    uMax = Math.max(uMax, u);
    vMin = Math.min(vMin, v);
    vMax = Math.max(vMax, v);
  }
  const span = Math.max(uMax - uMin, vMax - vMin, 0.1) * margin;
  return {
    kind,
    ...rect,
    center: [(uMin + uMax) / 2, (vMin + vMax) / 2],
    metersPerPixel: span / Math.min(rect.width, rect.height),
  };
}
