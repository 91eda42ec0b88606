// ── Interpretation view: layered treemaps, entity flow bars, path bars ──────
// Layer by layer: a Voronoi treemap of entity weights (same-category cells
// contiguous), beneath it a flow bar showing type-to-type mass into the next
// layer, and a path bar stacking the relation mix of the transition.

import type { LayerAggregate } from "../api.js";
import { toSvgPath, rectPolygon } from "../geometry/polygon.js";
import { groupedVoronoiTreemap } from "../geometry/voronoi.js";
import { entityColor, relationColors } from "../palette.js";
import { mulberry32 } from "../rng.js";

export interface InterpretationOptions {
  width?: number;
  layerHeight?: number;
  barHeight?: number;
  seed?: number;
  highlighted?: Set<string>; // entities connected to a clicked cell
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function stackedBar(
  shares: [string, number][],
  colorOf: (key: string) => string,
  width: number,
  height: number,
  y: number,
  cssClass: string,
): string {
  let x = 0;
  const parts: string[] = [];
  for (const [key, share] of shares) {
    const w = share * width;
    parts.push(
      `<rect class="${cssClass}" data-key="${esc(key)}" x="${x.toFixed(1)}" y="${y}"` +
        ` width="${w.toFixed(1)}" height="${height}" fill="${colorOf(key)}">` +
        `<title>${esc(key)}: ${(share * 100).toFixed(1)}%</title></rect>`,
    );
    x += w;
  }
  return parts.join("");
}

/**
 * Full SVG for the interpretation stack. Treemap cell areas track the
 * layer's normalized entity weights; flow and path bars are drawn from the
 * aggregate's own proportions, never recomputed.
 */
export function renderInterpretation(
  aggregate: LayerAggregate,
  etypeOf: Record<string, string>,
  options: InterpretationOptions = {},
): string {
  const width = options.width ?? 560;
  const layerHeight = options.layerHeight ?? 120;
  const barHeight = options.barHeight ?? 14;
  const seed = options.seed ?? 1;
  const relColors = relationColors(
    aggregate.relation_mix.flatMap((mix) => Object.keys(mix)),
  );
  const parts: string[] = [];
  let y = 0;
  aggregate.layers.forEach((layer, level) => {
    const items = Object.entries(layer).map(([key, weight]) => ({
      key,
      group: etypeOf[key] ?? "Gene",
      weight: Math.max(weight, 1e-6),
    }));
    if (items.length) {
      const cells = groupedVoronoiTreemap(
        items,
        rectPolygon(0, y, width, layerHeight),
        mulberry32(seed + level),
      );
      for (const cell of cells) {
        if (cell.polygon.length < 3) continue;
        const hl = options.highlighted?.has(cell.key)
          ? ` stroke="#222" stroke-width="2.5"`
          : ` stroke="#fff" stroke-width="1"`;
        parts.push(
          `<path class="cell" data-entity="${esc(cell.key)}" d="${toSvgPath(cell.polygon)}"` +
            ` fill="${entityColor(cell.group)}"${hl}>` +
            `<title>${esc(cell.key)} (${cell.group}): ${(cell.weight * 100).toFixed(1)}%</title></path>`,
        );
      }
    }
    y += layerHeight + 4;
    if (level < aggregate.flows.length) {
      const flow = aggregate.flows[level];
      const flowShares: [string, number][] = [];
      for (const [src, dsts] of Object.entries(flow).sort()) {
        for (const [dst, share] of Object.entries(dsts).sort()) {
          flowShares.push([`${src}>${dst}`, share]);
        }
      }
      parts.push(
        stackedBar(
          flowShares,
          (key) => entityColor(key.split(">")[0]),
          width,
          barHeight,
          y,
          "flow-bar",
        ),
      );
      y += barHeight + 3;
      const relShares = Object.entries(aggregate.relation_mix[level]).sort() as [
        string,
        number,
      ][];
      parts.push(
        stackedBar(
          relShares,
          (key) => relColors.get(key) ?? "#777",
          width,
          barHeight,
          y,
          "path-bar",
        ),
      );
      y += barHeight + 10;
    }
  });
  return `<svg class="interpretation" width="${width}" height="${y}">${parts.join("")}</svg>`;
}

/** Entities sharing a path with the clicked entity, for cell highlighting. */
export function connectedEntities(
  paths: { nodes: string[] }[],
  clicked: string,
): Set<string> {
  const out = new Set<string>();
  for (const p of paths) {
    if (p.nodes.includes(clicked)) {
      for (const n of p.nodes) out.add(n);
    }
  }
  return out;
}
