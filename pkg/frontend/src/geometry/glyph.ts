// ── Rank indicator arcs and radar glyphs for the embedding view ─────────────

import type { Point } from "./polygon.js";

/** Arc sweep for a ranked partner: starts at 12 o'clock, grows clockwise. */
export function rankArcSweep(rank: number, k = 50): number {
  if (rank < 1 || rank > k) throw new Error(`rank ${rank} outside 1..${k}`);
  return (2 * Math.PI * rank) / k;
}

export function rankArcSweepDegrees(rank: number, k = 50): number {
  return (rankArcSweep(rank, k) * 180) / Math.PI;
}

/**
 * SVG path for the rank arc around (cx, cy): from the top, clockwise by the
 * rank's sweep; the view draws a terminal bar at the returned end point.
 */
export function rankArcPath(
  cx: number,
  cy: number,
  r: number,
  rank: number,
  k = 50,
): { path: string; end: Point } {
  const sweep = rankArcSweep(rank, k);
  const x0 = cx;
  const y0 = cy - r;
  const x1 = cx + r * Math.sin(sweep);
  const y1 = cy - r * Math.cos(sweep);
  const largeArc = sweep > Math.PI ? 1 : 0;
  if (rank === k) {
    // full circle: two half arcs so SVG does not collapse the path
    return {
      path:
        `M${x0.toFixed(3)},${y0.toFixed(3)}` +
        `A${r},${r} 0 1 1 ${cx.toFixed(3)},${(cy + r).toFixed(3)}` +
        `A${r},${r} 0 1 1 ${x0.toFixed(3)},${y0.toFixed(3)}`,
      end: { x: x0, y: y0 },
    };
  }
  return {
    path:
      `M${x0.toFixed(3)},${y0.toFixed(3)}` +
      `A${r},${r} 0 ${largeArc} 1 ${x1.toFixed(3)},${y1.toFixed(3)}`,
    end: { x: x1, y: y1 },
  };
}

// ── Radar glyph: partners on concentric rings around the primary ────────────

export interface RadarSpoke {
  geneId: string;
  angle: number; // radians, 0 = due east in embedding space, CCW positive
  ring: number; // 0 = innermost
}

/** Nearest-rank percentile of a sorted ascending array. */
function percentile(sorted: number[], p: number): number {
  const idx = Math.max(0, Math.ceil(p * sorted.length) - 1);
  return sorted[idx];
}

/**
 * Project partner positions onto rings around the primary: the embedding
 * angle is preserved; the radius maps to one of `rings` bands cut at equal
 * distance quantiles (33rd/66th/100th percentile for the default 3).
 * Coincident points tie-break by gene id.
 */
export function radarGlyph(
  primary: Point,
  partners: { geneId: string; x: number; y: number }[],
  rings = 3,
): RadarSpoke[] {
  const withDist = partners
    .map((p) => ({
      geneId: p.geneId,
      angle: Math.atan2(p.y - primary.y, p.x - primary.x),
      dist: Math.hypot(p.x - primary.x, p.y - primary.y),
    }))
    .sort((a, b) => a.geneId.localeCompare(b.geneId));
  const dists = withDist.map((p) => p.dist).sort((a, b) => a - b);
  if (dists.length === 0) return [];
  const cuts = Array.from({ length: rings }, (_, i) =>
    percentile(dists, (i + 1) / rings),
  );
  return withDist.map((p) => {
    let ring = cuts.findIndex((c) => p.dist <= c);
    if (ring < 0) ring = rings - 1;
    return { geneId: p.geneId, angle: p.angle, ring };
  });
}
