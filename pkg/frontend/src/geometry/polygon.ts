// ── Convex polygon primitives ────────────────────────────────────────────────

export interface Point {
  x: number;
  y: number;
}

export type Polygon = Point[];

/** Signed area via the shoelace formula (positive for counter-clockwise). */
export function signedArea(poly: Polygon): number {
  let acc = 0;
  for (let i = 0; i < poly.length; i++) {
    const a = poly[i];
    const b = poly[(i + 1) % poly.length];
    acc += a.x * b.y - b.x * a.y;
  }
  return acc / 2;
}

export function polygonArea(poly: Polygon): number {
  return Math.abs(signedArea(poly));
}

export function centroid(poly: Polygon): Point {
  const area = signedArea(poly);
  if (Math.abs(area) < 1e-12) {
    // degenerate: average the vertices
    const n = Math.max(1, poly.length);
    return {
      x: poly.reduce((s, p) => s + p.x, 0) / n,
      y: poly.reduce((s, p) => s + p.y, 0) / n,
    };
  }
  let cx = 0;
  let cy = 0;
  for (let i = 0; i < poly.length; i++) {
    const a = poly[i];
    const b = poly[(i + 1) % poly.length];
    const cross = a.x * b.y - b.x * a.y;
    cx += (a.x + b.x) * cross;
    cy += (a.y + b.y) * cross;
  }
  return { x: cx / (6 * area), y: cy / (6 * area) };
}

/**
 * Clip a convex polygon by the half-plane ax·x + ay·y <= b
 * (Sutherland–Hodgman, one edge).
 */
export function clipHalfPlane(poly: Polygon, ax: number, ay: number, b: number): Polygon {
  const out: Polygon = [];
  const n = poly.length;
  for (let i = 0; i < n; i++) {
    const cur = poly[i];
    const nxt = poly[(i + 1) % n];
    const curIn = ax * cur.x + ay * cur.y <= b;
    const nxtIn = ax * nxt.x + ay * nxt.y <= b;
    if (curIn) out.push(cur);
    if (curIn !== nxtIn) {
      const da = ax * cur.x + ay * cur.y - b;
      const db = ax * nxt.x + ay * nxt.y - b;
      const t = da / (da - db);
      out.push({ x: cur.x + t * (nxt.x - cur.x), y: cur.y + t * (nxt.y - cur.y) });
    }
  }
  return out;
}

/** Ray-casting point-in-polygon; works for any simple polygon (lasso shapes). */
export function pointInPolygon(p: Point, poly: Polygon): boolean {
  let inside = false;
  for (let i = 0, j = poly.length - 1; i < poly.length; j = i++) {
    const a = poly[i];
    const b = poly[j];
    const crosses =
      a.y > p.y !== b.y > p.y &&
      p.x < ((b.x - a.x) * (p.y - a.y)) / (b.y - a.y) + a.x;
    if (crosses) inside = !inside;
  }
  return inside;
}

export function rectPolygon(x: number, y: number, width: number, height: number): Polygon {
  return [
    { x, y },
    { x: x + width, y },
    { x: x + width, y: y + height },
    { x, y: y + height },
  ];
}

export function toSvgPath(poly: Polygon): string {
  if (poly.length === 0) return "";
  const coords = poly.map((p) => `${p.x.toFixed(3)},${p.y.toFixed(3)}`);
  return `M${coords.join("L")}Z`;
}
