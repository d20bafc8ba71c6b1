import { describe, expect, it } from "vitest";

import { fitViewport, planeCoords, project } from "../src/scene.js";

describe("orthographic projections", () => {
  it("top view maps +y right and +x up", () => {
    expect(planeCoords("top", [2, 3, 9])).toEqual([3, 2]);
  });

  it("side view maps +x right and +z up", () => {
    expect(planeCoords("side", [2, 9, 5])).toEqual([2, 5]);
  });

  it("fit keeps all points inside the rectangle", () => {
    const pts: [number, number, number][] = [
      [0, -0.4, 0],
      [0.5, 0.4, 0.7],
      [0.2, 0.0, 0.3],
    ];
    for (const kind of ["top", "side"] as const) {
      const vp = fitViewport(kind, { x: 0, y: 0, width: 400, height: 300 }, pts);
      for (const p of pts) {
        const [px, py] = project(vp, p);
        expect(px).toBeGreaterThanOrEqual(0);
        expect(px).toBeLessThanOrEqual(400);
        expect(py).toBeGreaterThanOrEqual(0);
        expect(py).toBeLessThanOrEqual(300);
      }
    }
  });

  it("screen y grows downward as world height drops", () => {
    const vp = fitViewport(
      "side",
      { x: 0, y: 0, width: 100, height: 100 },
      [
        [0, 0, 0],
        [0, 0, 1],
      ]
    );
    const [, yLow] = project(vp, [0, 0, 0]);
    const [, yHigh] = project(vp, [0, 0, 1]);
    expect(yHigh).toBeLessThan(yLow);
  });
});
