// ── Embedding view: projected genes, rank indicators, radar, lasso ──────────

import type { EmbeddingPoint } from "../api.js";
import { rankArcPath } from "../geometry/glyph.js";
import { Point, Polygon, pointInPolygon } from "../geometry/polygon.js";
import { highlightColor } from "../palette.js";

export interface EmbeddingTransform {
  sx: (x: number) => number;
  sy: (y: number) => number;
}

export function fitTransform(
  points: EmbeddingPoint[],
  width: number,
  height: number,
  pad = 20,
): EmbeddingTransform {
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const y0 = Math.min(...ys);
  const y1 = Math.max(...ys);
  const dx = x1 - x0 || 1;
  const dy = y1 - y0 || 1;
  return {
    sx: (x) => pad + ((x - x0) / dx) * (width - 2 * pad),
    sy: (y) => pad + ((y - y0) / dy) * (height - 2 * pad),
  };
}

/**
 * SVG for the scatter: dashed connector lines from the primary to predicted
 * partners (solid once tagged), rank arcs around predicted partners, points
 * colored purely by the payload's highlight class.
 */
export function renderEmbedding(
  points: EmbeddingPoint[],
  primary: string | null,
  width = 640,
  height = 480,
  topK = 50,
): string {
  if (points.length === 0) return `<svg class="embedding" width="${width}" height="${height}"></svg>`;
  const t = fitTransform(points, width, height);
  const byId = new Map(points.map((p) => [p.gene_id, p]));
  const parts: string[] = [];
  const prim = primary ? byId.get(primary) : undefined;
  if (prim) {
    for (const p of points) {
      if (p.rank === undefined || p.gene_id === primary) continue;
      const dash = p.tagged ? "" : ` stroke-dasharray="4,3"`;
      parts.push(
        `<line x1="${t.sx(prim.x).toFixed(1)}" y1="${t.sy(prim.y).toFixed(1)}"` +
          ` x2="${t.sx(p.x).toFixed(1)}" y2="${t.sy(p.y).toFixed(1)}"` +
          ` stroke="#bbb" stroke-width="1"${dash}/>`,
      );
    }
  }
  for (const p of points) {
    const r = p.highlight === "none" ? 2.5 : 4;
    parts.push(
      `<circle data-gene="${p.gene_id}" cx="${t.sx(p.x).toFixed(1)}"` +
        ` cy="${t.sy(p.y).toFixed(1)}" r="${r}" fill="${highlightColor(p.highlight)}"/>`,
    );
    if (p.rank !== undefined) {
      const arc = rankArcPath(t.sx(p.x), t.sy(p.y), r + 3.5, p.rank, topK);
      parts.push(
        `<path d="${arc.path}" fill="none" stroke="#555" stroke-width="1.4"/>` +
          `<line x1="${arc.end.x.toFixed(1)}" y1="${arc.end.y.toFixed(1)}"` +
          ` x2="${arc.end.x.toFixed(1)}" y2="${(arc.end.y - 3).toFixed(1)}"` +
          ` stroke="#555" stroke-width="1.4"/>`,
      );
    }
  }
  return `<svg class="embedding" width="${width}" height="${height}">${parts.join("")}</svg>`;
}

/** Exact lasso: gene ids of points strictly inside the polygon. */
export function lassoSelect(
  points: { gene_id: string; x: number; y: number }[],
  polygon: Polygon,
): string[] {
  return points
    .filter((p) => pointInPolygon({ x: p.x, y: p.y } as Point, polygon))
    .map((p) => p.gene_id);
}
