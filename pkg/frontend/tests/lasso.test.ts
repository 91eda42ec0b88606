import { describe, expect, it } from "vitest";

import { pointInPolygon } from "../src/geometry/polygon.js";
import { lassoSelect } from "../src/views/embedding.js";

describe("lasso selection", () => {
  it("returns the exact point set inside a polygon on a grid fixture", () => {
    // 11x11 integer grid; lasso is the diamond |x-5| + |y-5| <= 3.4
    const points = [];
    for (let x = 0; x <= 10; x++) {
      for (let y = 0; y <= 10; y++) {
        points.push({ gene_id: `g_${x}_${y}`, x, y });
      }
    }
    const diamond = [
      { x: 5, y: 1.6 },
      { x: 8.4, y: 5 },
      { x: 5, y: 8.4 },
      { x: 1.6, y: 5 },
    ];
    const got = new Set(lassoSelect(points, diamond));
    const expected = new Set(
      points
        .filter((p) => Math.abs(p.x - 5) + Math.abs(p.y - 5) <= 3.4)
        .map((p) => p.gene_id),
    );
    expect(got).toEqual(expected);
    expect(got.size).toBe(25);
  });

  it("handles concave lassos", () => {
    // L-shaped region: inside only the bottom band and the left column
    const lasso = [
      { x: 0, y: 0 },
      { x: 10, y: 0 },
      { x: 10, y: 3 },
      { x: 3, y: 3 },
      { x: 3, y: 10 },
      { x: 0, y: 10 },
    ];
    expect(pointInPolygon({ x: 5, y: 1 }, lasso)).toBe(true);
    expect(pointInPolygon({ x: 1, y: 8 }, lasso)).toBe(true);
    expect(pointInPolygon({ x: 6, y: 6 }, lasso)).toBe(false);
  });

  it("selects nothing for a degenerate polygon", () => {
    expect(
      lassoSelect([{ gene_id: "a", x: 1, y: 1 }], [{ x: 0, y: 0 }, { x: 1, y: 0 }]),
    ).toEqual([]);
  });
});
