// ── Modifier view: ego network and the metapath modifier box ────────────────

import type { EgoPayload, LatticeReport, SlotStats, StrategyReport } from "../api.js";
import { entityColor } from "../palette.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/**
 * Ego-network SVG: ring k entities sit on a circle of radius proportional
 * to k, grouped by category along the arc; entity colors match the
 * Interpretation view. Edges join consecutive rings; hovering is wired by
 * the host through the data attributes.
 */
export function renderEgoNetwork(ego: EgoPayload, size = 420): string {
  const cx = size / 2;
  const cy = size / 2;
  const ringGap = (size / 2 - 24) / Math.max(1, ego.rings.length - 1);
  const pos = new Map<string, { x: number; y: number; etype: string }>();
  ego.rings.forEach((ring, k) => {
    const members: { id: string; etype: string }[] = [];
    for (const [etype, ids] of Object.entries(ring).sort()) {
      for (const id of ids) members.push({ id, etype });
    }
    const radius = k * ringGap;
    members.forEach((m, i) => {
      const angle = (2 * Math.PI * i) / Math.max(1, members.length) - Math.PI / 2;
      pos.set(m.id, {
        x: cx + radius * Math.cos(angle),
        y: cy + radius * Math.sin(angle),
        etype: m.etype,
      });
    });
  });
  const parts: string[] = [];
  ego.transitions.forEach((layer, k) => {
    for (const t of layer) {
      const a = pos.get(t.head);
      const b = pos.get(t.tail);
      if (!a || !b) continue;
      parts.push(
        `<line class="ego-edge" data-head="${esc(t.head)}" data-relation="${esc(t.relation)}"` +
          ` data-tail="${esc(t.tail)}" x1="${a.x.toFixed(1)}" y1="${a.y.toFixed(1)}"` +
          ` x2="${b.x.toFixed(1)}" y2="${b.y.toFixed(1)}" stroke="#ccc" stroke-width="1"/>`,
      );
    }
  });
  for (const [id, p] of pos) {
    parts.push(
      `<circle class="ego-node" data-entity="${esc(id)}" cx="${p.x.toFixed(1)}"` +
        ` cy="${p.y.toFixed(1)}" r="${id === ego.center ? 7 : 4.5}"` +
        ` fill="${entityColor(p.etype)}"><title>${esc(id)}</title></circle>`,
    );
  }
  return `<svg class="ego" width="${size}" height="${size}">${parts.join("")}</svg>`;
}

/** Log-binned endpoint histogram with the box plot and red current marker. */
export function renderSlotStats(stats: SlotStats, width = 200, height = 70): string {
  const bins = stats.histogram;
  if (!bins.length) return `<svg class="slot-stats" width="${width}" height="${height}"></svg>`;
  const maxCount = Math.max(...bins.map((b) => b.count), 1);
  const maxHi = Math.max(bins[bins.length - 1].hi, 1);
  const logMax = Math.log10(Math.max(maxHi, 1.0001));
  const xOf = (v: number) => (Math.log10(Math.max(v, 1)) / Math.max(logMax, 1e-9)) * width;
  const histH = height - 26;
  const parts: string[] = [];
  for (const b of bins) {
    const x0 = xOf(b.lo);
    const x1 = Math.max(xOf(b.hi), x0 + 1);
    const h = (b.count / maxCount) * histH;
    parts.push(
      `<rect class="hist-bin" x="${x0.toFixed(1)}" y="${(histH - h).toFixed(1)}"` +
        ` width="${(x1 - x0).toFixed(1)}" height="${h.toFixed(1)}" fill="#9ecae1" stroke="#fff">` +
        `<title>[${b.lo.toFixed(1)}, ${b.hi.toFixed(1)}]: ${b.count}</title></rect>`,
    );
  }
  const box = stats.boxplot;
  const yb = histH + 9;
  parts.push(
    `<line x1="${xOf(box.min)}" y1="${yb}" x2="${xOf(box.max)}" y2="${yb}" stroke="#555"/>`,
    `<rect class="box" x="${xOf(box.q1)}" y="${yb - 5}" width="${Math.max(
      xOf(box.q3) - xOf(box.q1),
      1,
    )}" height="10" fill="#c6dbef" stroke="#555"/>`,
    `<line x1="${xOf(box.median)}" y1="${yb - 5}" x2="${xOf(box.median)}" y2="${yb + 5}" stroke="#555"/>`,
    `<line class="current" x1="${xOf(stats.current)}" y1="${yb - 7}" x2="${xOf(
      stats.current,
    )}" y2="${yb + 7}" stroke="rgb(239,85,59)" stroke-width="2"/>`,
  );
  return `<svg class="slot-stats" width="${width}" height="${height}">${parts.join("")}</svg>`;
}

const ONE_LOW = ["L-H-H", "H-L-H", "H-H-L"];
const SEGMENT_COLORS: Record<string, string> = {
  "L-H-H": "#59a14f",
  "H-L-H": "#9c755f",
  "H-H-L": "#4e79a7",
};

/**
 * Primary and Secondary bars with the two connecting rules. The Primary bar
 * height is the highest-granularity count with the three 1-Low sub-segments;
 * the Secondary bar renders rule 1 (dashed candidate children of a 1-Low
 * selection) or rule 2 (the 2-Low selection as fractions of its two
 * parents, top and bottom).
 */
export function renderGranularityBars(
  lattice: LatticeReport,
  width = 190,
  height = 170,
): string {
  const total = Math.max(lattice.primary_bar.total, 1);
  const barW = 34;
  const x1 = 18;
  const x2 = 120;
  const parts: string[] = [];
  // primary bar outline
  parts.push(
    `<rect class="primary-bar" x="${x1}" y="10" width="${barW}" height="${height - 20}"` +
      ` fill="#eee" stroke="#888"/>`,
  );
  let segY = 10;
  for (const pattern of ONE_LOW) {
    const count = lattice.primary_bar.segments[pattern] ?? 0;
    const h = (count / total) * (height - 20);
    parts.push(
      `<rect class="primary-segment" data-pattern="${pattern}" x="${x1}" y="${segY.toFixed(1)}"` +
        ` width="${barW}" height="${h.toFixed(1)}" fill="${SEGMENT_COLORS[pattern]}" fill-opacity="0.85">` +
        `<title>${pattern}: ${count}/${total}</title></rect>`,
    );
    segY += h;
  }
  const bar = lattice.secondary_bar;
  if (bar && bar.rule === 1) {
    const selH = height - 20;
    parts.push(
      `<rect class="secondary-bar" x="${x2}" y="10" width="${barW}" height="${selH}"` +
        ` fill="#eee" stroke="#888"><title>${lattice.pattern}: ${bar.height}</title></rect>`,
    );
    let y = 10;
    for (const part of bar.parts as { pattern: string; count: number; fraction: number }[]) {
      const h = part.fraction * selH;
      parts.push(
        `<rect class="secondary-segment" data-pattern="${part.pattern}" x="${x2}"` +
          ` y="${y.toFixed(1)}" width="${barW}" height="${h.toFixed(1)}"` +
          ` fill="#f2a0a0" fill-opacity="0.8"><title>${part.pattern}: ${part.count}/${bar.height}</title></rect>`,
      );
      // dashed candidate link: these children are not actually selected
      parts.push(
        `<line class="candidate-link" x1="${x1 + barW}" y1="${(10 + selH / 2).toFixed(1)}"` +
          ` x2="${x2}" y2="${(y + h / 2).toFixed(1)}" stroke="#888" stroke-dasharray="5,4"/>`,
      );
      y += h + 2;
    }
  } else if (bar && bar.rule === 2) {
    const half = (height - 24) / 2;
    (bar.parts as { parent: string; count: number; fraction: number }[]).forEach(
      (part, i) => {
        const y0 = 10 + i * (half + 4);
        const h = part.fraction * half;
        parts.push(
          `<rect class="secondary-bar" x="${x2}" y="${y0}" width="${barW}" height="${half}"` +
            ` fill="#eee" stroke="#888"><title>${part.parent}: ${part.count}</title></rect>`,
          `<rect class="secondary-segment" data-parent="${part.parent}" x="${x2}"` +
            ` y="${(y0 + half - h).toFixed(1)}" width="${barW}" height="${h.toFixed(1)}"` +
            ` fill="#f2a0a0" fill-opacity="0.8">` +
            `<title>${lattice.pattern}/${part.parent}: ${(part.fraction * 100).toFixed(1)}%</title></rect>`,
          `<line class="parent-link" x1="${x1 + barW}" y1="${(height / 2).toFixed(1)}"` +
            ` x2="${x2}" y2="${(y0 + half / 2).toFixed(1)}" stroke="#888"/>`,
        );
      },
    );
  }
  return `<svg class="granularity-bars" width="${width}" height="${height}">${parts.join("")}</svg>`;
}

/** The metapath display box: anchor row, high-granularity row, stats, bars. */
export function renderMetapathBox(report: StrategyReport, etypeOf: Record<string, string>): string {
  const a = report.strategy.anchor;
  const [ls, lr, lt] = report.strategy.pattern.split("-");
  const cell = (value: string, level: string, slot: number, active: boolean) =>
    `<td class="slot${active ? " active" : ""}" data-slot="${slot}" data-level="${level}">${esc(value)}</td>`;
  return (
    `<div class="metapath-box" data-strategy="${report.id}">` +
    `<div class="endpoint-stats source">${renderSlotStats(report.source_stats)}</div>` +
    `<table class="strategy"><tr>` +
    cell(a.head, "L", 0, ls === "L") +
    cell(a.relation, "L", 1, lr === "L") +
    cell(a.tail, "L", 2, lt === "L") +
    `</tr><tr>` +
    cell(etypeOf[a.head] ?? "Gene", "H", 0, ls === "H") +
    cell("All_edge", "H", 1, lr === "H") +
    cell(etypeOf[a.tail] ?? "BP", "H", 2, lt === "H") +
    `</tr></table>` +
    `<div class="endpoint-stats target">${renderSlotStats(report.target_stats)}</div>` +
    renderGranularityBars(report.lattice) +
    `</div>`
  );
}
