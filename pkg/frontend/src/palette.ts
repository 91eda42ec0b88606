// ── Color contract ───────────────────────────────────────────────────────────
// Highlight classes use fixed RGB values; the five entity-category colors are
// identical wherever entities appear (Interpretation and Modifier views);
// relation colors come from a fixed-seed categorical palette so they are
// stable across sessions.

import { mulberry32 } from "./rng.js";

export type HighlightClass =
  | "disease"
  | "predicted"
  | "correct"
  | "validated"
  | "selected"
  | "lasso"
  | "none";

export const HIGHLIGHT_RGB: Record<HighlightClass, [number, number, number]> = {
  disease: [171, 99, 250],
  predicted: [25, 211, 243],
  correct: [239, 85, 59],
  validated: [255, 161, 90],
  selected: [99, 110, 250],
  lasso: [182, 232, 128],
  none: [180, 180, 186],
};

export function highlightColor(cls: HighlightClass): string {
  const [r, g, b] = HIGHLIGHT_RGB[cls];
  return `rgb(${r},${g},${b})`;
}

export const ENTITY_COLORS: Record<string, string> = {
  Gene: "#59a14f",
  BP: "#4e79a7",
  MF: "#f28e2b",
  CC: "#b07aa1",
  Pathway: "#e15759",
};

export function entityColor(etype: string): string {
  return ENTITY_COLORS[etype] ?? "#888888";
}

const RELATION_PALETTE_SEED = 0x5eed;

/**
 * Deterministic color per relation id: ids are sorted, then hues are dealt
 * around the wheel by the golden angle from a seeded start.
 */
export function relationColors(relationIds: string[]): Map<string, string> {
  const rng = mulberry32(RELATION_PALETTE_SEED);
  const start = rng() * 360;
  const sorted = [...relationIds].sort();
  const out = new Map<string, string>();
  sorted.forEach((rid, i) => {
    const hue = (start + i * 137.50776405003785) % 360;
    const light = 38 + (i % 3) * 9;
    out.set(rid, `hsl(${hue.toFixed(2)},62%,${light}%)`);
  });
  return out;
}
