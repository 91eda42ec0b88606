import { describe, expect, it } from "vitest";

import { polygonArea, rectPolygon } from "../src/geometry/polygon.js";
import { groupedVoronoiTreemap, voronoiTreemap } from "../src/geometry/voronoi.js";
import { mulberry32 } from "../src/rng.js";

const UNIT = rectPolygon(0, 0, 1, 1);

/** Shoelace-oracle check: every cell within tol relative area error. */
function assertAreas(
  cells: { weight: number; polygon: { x: number; y: number }[] }[],
  regionArea: number,
  tol = 0.05,
) {
  const total = cells.reduce((s, c) => s + c.weight, 0);
  for (const cell of cells) {
    const target = (cell.weight / total) * regionArea;
    const area = polygonArea(cell.polygon);
    expect(Math.abs(area - target) / target).toBeLessThanOrEqual(tol);
  }
  const covered = cells.reduce((s, c) => s + polygonArea(c.polygon), 0);
  expect(covered).toBeCloseTo(regionArea, 6);
}

describe("voronoiTreemap", () => {
  it("splits {4,1,1} in the unit square proportionally", () => {
    const cells = voronoiTreemap(
      [
        { key: "a", weight: 4 },
        { key: "b", weight: 1 },
        { key: "c", weight: 1 },
      ],
      UNIT,
      mulberry32(1),
    );
    assertAreas(cells, 1.0);
    const a = cells.find((c) => c.key === "a")!;
    expect(polygonArea(a.polygon)).toBeGreaterThan(0.6);
  });

  it("gives a single entity the whole region", () => {
    const cells = voronoiTreemap([{ key: "solo", weight: 3 }], UNIT, mulberry32(2));
    expect(cells).toHaveLength(1);
    expect(polygonArea(cells[0].polygon)).toBeCloseTo(1.0, 9);
  });

  it("lays out 50 seeded random weights within the 5% area tolerance", () => {
    for (const seed of [11, 42, 99]) {
      const rng = mulberry32(seed);
      const weights = Array.from({ length: 50 }, (_, i) => ({
        key: `w${i}`,
        weight: 0.5 + rng() * 9.5,
      }));
      const cells = voronoiTreemap(weights, rectPolygon(0, 0, 800, 600), mulberry32(seed + 1));
      assertAreas(cells, 800 * 600);
    }
  });

  it("rejects non-positive weights", () => {
    expect(() =>
      voronoiTreemap([{ key: "bad", weight: 0 }], UNIT, mulberry32(3)),
    ).toThrow(/positive/);
  });

  it("keeps same-group cells contiguous in the grouped layout", () => {
    const rng = mulberry32(7);
    const items = [
      ...Array.from({ length: 6 }, (_, i) => ({ key: `g${i}`, group: "Gene", weight: 1 + rng() * 3 })),
      ...Array.from({ length: 5 }, (_, i) => ({ key: `b${i}`, group: "BP", weight: 1 + rng() * 3 })),
      ...Array.from({ length: 4 }, (_, i) => ({ key: `c${i}`, group: "CC", weight: 1 + rng() * 2 })),
    ];
    const cells = groupedVoronoiTreemap(items, rectPolygon(0, 0, 400, 400), mulberry32(8));
    expect(cells).toHaveLength(items.length);
    // group areas also track group weight totals
    const regionArea = 400 * 400;
    const total = items.reduce((s, w) => s + w.weight, 0);
    for (const group of ["Gene", "BP", "CC"]) {
      const groupCells = cells.filter((c) => c.group === group);
      const got = groupCells.reduce((s, c) => s + polygonArea(c.polygon), 0);
      const target = (items.filter((i) => i.group === group).reduce((s, w) => s + w.weight, 0) / total) * regionArea;
      expect(Math.abs(got - target) / target).toBeLessThanOrEqual(0.06);
    }
    // every member cell within tolerance of its weight share inside the group
    for (const group of ["Gene", "BP", "CC"]) {
      const groupCells = cells.filter((c) => c.group === group);
      const groupArea = groupCells.reduce((s, c) => s + polygonArea(c.polygon), 0);
      assertAreas(groupCells, groupArea, 0.06);
    }
  });

  it("is deterministic for a fixed seed", () => {
    const weights = Array.from({ length: 12 }, (_, i) => ({ key: `w${i}`, weight: i + 1 }));
    const a = voronoiTreemap(weights, UNIT, mulberry32(5));
    const b = voronoiTreemap(weights, UNIT, mulberry32(5));
    expect(JSON.stringify(a)).toEqual(JSON.stringify(b));
  });
});
