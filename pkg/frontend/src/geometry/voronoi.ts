// ── Voronoi treemap via additively weighted power diagrams ──────────────────
// Each entity gets a convex cell whose area tracks its weight. Sites carry a
// power weight w (a squared radius); the dominance boundary between sites i
// and j is the line 2(sj-si)·x <= |sj|^2 - |si|^2 + wi - wj. The layout loop
// alternates Lloyd moves (site -> cell centroid) with multiplicative weight
// adaptation until every cell is within the area tolerance.

import type { Rng } from "../rng.js";
import {
  Point,
  Polygon,
  centroid,
  clipHalfPlane,
  polygonArea,
  pointInPolygon,
} from "./polygon.js";

export interface TreemapCell {
  key: string;
  weight: number;
  site: Point;
  polygon: Polygon;
  area: number;
}

export interface TreemapOptions {
  maxIterations?: number; // default 300
  tolerance?: number; // max relative area error, default 0.05
}

interface Site {
  key: string;
  weight: number; // target weight (input units)
  x: number;
  y: number;
  power: number; // current power-diagram weight
}

function powerCell(region: Polygon, sites: Site[], i: number): Polygon {
  let cell = region;
  const si = sites[i];
  for (let j = 0; j < sites.length && cell.length; j++) {
    if (j === i) continue;
    const sj = sites[j];
    const ax = 2 * (sj.x - si.x);
    const ay = 2 * (sj.y - si.y);
    const b =
      sj.x * sj.x + sj.y * sj.y - (si.x * si.x + si.y * si.y) + si.power - sj.power;
    cell = clipHalfPlane(cell, ax, ay, b);
  }
  return cell;
}

export function powerDiagram(region: Polygon, sites: Site[]): Polygon[] {
  return sites.map((_, i) => powerCell(region, sites, i));
}

function randomPointInside(region: Polygon, rng: Rng): Point {
  const xs = region.map((p) => p.x);
  const ys = region.map((p) => p.y);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  for (let attempt = 0; attempt < 1000; attempt++) {
    const p = { x: x0 + rng() * (x1 - x0), y: y0 + rng() * (y1 - y0) };
    if (pointInPolygon(p, region)) return p;
  }
  return centroid(region);
}

/**
 * Area-proportional convex subdivision of a convex region.
 *
 * Runs until every |area_i/total - w_i/Σw| <= tolerance·(w_i/Σw) or the
 * iteration budget is spent. Weights must be positive.
 */
export function voronoiTreemap(
  weights: { key: string; weight: number }[],
  region: Polygon,
  rng: Rng,
  options: TreemapOptions = {},
): TreemapCell[] {
  const maxIterations = options.maxIterations ?? 300;
  const tolerance = options.tolerance ?? 0.05;
  if (weights.length === 0) return [];
  if (weights.some((w) => w.weight <= 0)) {
    throw new Error("treemap weights must be positive");
  }
  const total = weights.reduce((s, w) => s + w.weight, 0);
  const regionArea = polygonArea(region);
  if (weights.length === 1) {
    const only = weights[0];
    return [
      {
        key: only.key,
        weight: only.weight,
        site: centroid(region),
        polygon: region,
        area: regionArea,
      },
    ];
  }

  const sites: Site[] = weights.map((w) => {
    const p = randomPointInside(region, rng);
    return { key: w.key, weight: w.weight, x: p.x, y: p.y, power: 1e-6 };
  });

  // Two phases. Shaping: Lloyd moves plus multiplicative weight nudges with
  // a nearest-site cap, which spreads sites and roughly sizes the cells.
  // Refinement: positions frozen; for fixed sites the weight-to-area map is
  // the gradient of a convex dual, so additive steps with a backtracking
  // rate drive every cell onto its target area.
  const lloydPhase = Math.min(50, maxIterations);
  let lr = 0.5;
  let prevWorst = Infinity;
  let cells: Polygon[] = powerDiagram(region, sites);
  for (let iter = 0; iter < maxIterations; iter++) {
    const areas = cells.map((c) => (c.length >= 3 ? polygonArea(c) : 0));
    let worst = 0;
    for (let i = 0; i < sites.length; i++) {
      const target = (sites[i].weight / total) * regionArea;
      worst = Math.max(worst, Math.abs(areas[i] - target) / target);
    }
    // the returned cells are exactly the measured ones; never adapt after
    // the tolerance is reached
    if (worst <= tolerance) break;

    if (iter < lloydPhase) {
      for (let i = 0; i < sites.length; i++) {
        if (cells[i].length >= 3) {
          const c = centroid(cells[i]);
          sites[i].x = c.x;
          sites[i].y = c.y;
        }
      }
      for (let i = 0; i < sites.length; i++) {
        const target = (sites[i].weight / total) * regionArea;
        const current = Math.max(areas[i], target / 100);
        const factor = Math.min(2, Math.max(0.5, target / current));
        sites[i].power = Math.max(sites[i].power * factor, 1e-9 * regionArea);
        let nearest = Infinity;
        for (let j = 0; j < sites.length; j++) {
          if (i === j) continue;
          const dx = sites[i].x - sites[j].x;
          const dy = sites[i].y - sites[j].y;
          nearest = Math.min(nearest, dx * dx + dy * dy);
        }
        sites[i].power = Math.min(sites[i].power, nearest);
      }
    } else {
      if (worst > prevWorst) lr = Math.max(0.02, lr * 0.6);
      else lr = Math.min(0.8, lr * 1.05);
      prevWorst = worst;
      for (let i = 0; i < sites.length; i++) {
        const target = (sites[i].weight / total) * regionArea;
        sites[i].power += lr * (target - areas[i]);
      }
    }
    cells = powerDiagram(region, sites);
  }

  return sites.map((s, i) => ({
    key: s.key,
    weight: s.weight,
    site: { x: s.x, y: s.y },
    polygon: cells[i],
    area: cells[i].length >= 3 ? polygonArea(cells[i]) : 0,
  }));
}

export interface GroupedCell extends TreemapCell {
  group: string;
}

/**
 * Two-level layout: the region is first split among groups, then each group's
 * convex cell is subdivided among its members, so same-group entities stay
 * contiguous.
 */
export function groupedVoronoiTreemap(
  items: { key: string; group: string; weight: number }[],
  region: Polygon,
  rng: Rng,
  options: TreemapOptions = {},
): GroupedCell[] {
  const byGroup = new Map<string, { key: string; weight: number }[]>();
  for (const item of items) {
    if (!byGroup.has(item.group)) byGroup.set(item.group, []);
    byGroup.get(item.group)!.push({ key: item.key, weight: item.weight });
  }
  const groups = [...byGroup.keys()].sort();
  const groupWeights = groups.map((g) => ({
    key: g,
    weight: byGroup.get(g)!.reduce((s, w) => s + w.weight, 0),
  }));
  const outer = voronoiTreemap(groupWeights, region, rng, options);
  const out: GroupedCell[] = [];
  for (const cell of outer) {
    const members = byGroup.get(cell.key)!;
    if (cell.polygon.length < 3) continue;
    const inner = voronoiTreemap(members, cell.polygon, rng, options);
    for (const m of inner) {
      out.push({ ...m, group: cell.key });
    }
  }
  return out;
}
