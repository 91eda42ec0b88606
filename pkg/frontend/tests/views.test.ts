import { describe, expect, it } from "vitest";

import { connectedEntities, renderInterpretation } from "../src/views/interpretation.js";
import { renderGranularityBars, renderSlotStats } from "../src/views/modifier.js";
import { renderEmbedding } from "../src/views/embedding.js";
import { renderModelLog, renderOperationList, renderPartnerTable } from "../src/views/session.js";
import type { LatticeReport } from "../src/api.js";

describe("partner table", () => {
  it("emphasizes correct predictions and marks tagged rows", () => {
    const html = renderPartnerTable(
      [
        { partner: "G1", name: "G1", score: 1.25, rank: 1, correct: true },
        { partner: "G2", name: "G2", score: 0.75, rank: 2, correct: false },
      ],
      ["G2"],
    );
    expect(html).toContain("rgb(239,85,59)");
    expect(html).toContain('data-partner="G2" class="tagged"');
    expect(html.indexOf("G1")).toBeLessThan(html.indexOf("G2"));
  });
});

describe("model log", () => {
  it("renders grouped bars with exactly one active model", () => {
    const html = renderModelLog([
      {
        version: 1,
        kg_version: 1,
        metrics: { "precision@50": 0.2, "recall@50": 0.9, "ndcg@50": 0.5 },
        wall_seconds: 10,
        active: false,
      },
      {
        version: 2,
        kg_version: 2,
        metrics: { "precision@50": 0.25, "recall@50": 0.92, "ndcg@50": 0.55 },
        wall_seconds: 9,
        active: true,
      },
    ]);
    expect(html.match(/class="model active"/g)).toHaveLength(1);
    expect(html).toContain('data-model="1"');
    expect(html).toContain("width:25.0%");
  });
});

describe("operation list", () => {
  it("shows pending strategies with checkboxes and committed records", () => {
    const html = renderOperationList(
      [
        {
          id: 3,
          strategy: { anchor: { head: "g", relation: "r", tail: "b" }, pattern: "H-H-L" },
          lattice: {
            pattern: "H-H-L",
            counts: { "H-H-L": 7 } as Record<string, number>,
            primary_bar: { total: 9, segments: {} },
            secondary_bar: null,
          },
          source_stats: {} as never,
          target_stats: {} as never,
        },
      ],
      [
        {
          id: 1,
          timestamp: 0,
          strategies: [],
          note: "first",
          kg_version: 2,
          total_deleted: 12,
          fraction_deleted: 0.01,
          model_version: 2,
        },
      ],
    );
    expect(html).toContain('data-check="3"');
    expect(html).toContain("7 matches");
    expect(html).toContain("model v2");
    expect(html).toContain("<textarea");
  });
});

describe("embedding svg", () => {
  const points = [
    { gene_id: "P", x: 0, y: 0, highlight: "selected" as const },
    { gene_id: "A", x: 1, y: 1, highlight: "predicted" as const, rank: 5, tagged: false },
    { gene_id: "B", x: 2, y: 0.5, highlight: "correct" as const, rank: 1, tagged: true },
    { gene_id: "C", x: 0.5, y: 2, highlight: "none" as const },
  ];

  it("draws dashed connectors that turn solid for tagged partners", () => {
    const svg = renderEmbedding(points, "P");
    const dashed = svg.match(/stroke-dasharray="4,3"/g) ?? [];
    expect(dashed).toHaveLength(1); // A dashed, B solid
    expect(svg.match(/<line[^>]*x1/g)!.length).toBeGreaterThanOrEqual(2);
  });

  it("adds a rank arc per predicted partner", () => {
    const svg = renderEmbedding(points, "P");
    expect(svg.match(/<path d="M/g)).toHaveLength(2);
  });

  it("colors points from the payload classes only", () => {
    const svg = renderEmbedding(points, "P");
    expect(svg).toContain("rgb(99,110,250)");
    expect(svg).toContain("rgb(25,211,243)");
    expect(svg).toContain("rgb(239,85,59)");
  });
});

describe("interpretation stack", () => {
  const aggregate = {
    layers: [{ g0: 1.0 }, { b1: 0.7, b2: 0.3 }, { g2: 1.0 }],
    flows: [{ Gene: { BP: 1.0 } }, { BP: { Gene: 1.0 } }],
    relation_mix: [{ involved_in: 1.0 }, { involved_in_inv: 1.0 }],
  };
  const etypes = { g0: "Gene", b1: "BP", b2: "BP", g2: "Gene" };

  it("renders one treemap cell per entity and stacked bars per transition", () => {
    const svg = renderInterpretation(aggregate, etypes);
    expect(svg.match(/class="cell"/g)).toHaveLength(4);
    expect(svg.match(/class="flow-bar"/g)).toHaveLength(2);
    expect(svg.match(/class="path-bar"/g)).toHaveLength(2);
  });

  it("highlights entities connected to a clicked cell", () => {
    const paths = [
      { nodes: ["g0", "b1", "g2"] },
      { nodes: ["g0", "b2"] },
    ];
    const connected = connectedEntities(paths, "b1");
    expect(connected).toEqual(new Set(["g0", "b1", "g2"]));
    const svg = renderInterpretation(aggregate, etypes, { highlighted: connected });
    expect(svg.match(/stroke="#222"/g)).toHaveLength(3);
  });
});

describe("modifier widgets", () => {
  it("marks the current entity in red on the box plot", () => {
    const svg = renderSlotStats({
      slot: "target",
      histogram: [
        { lo: 1, hi: 3.2, count: 5 },
        { lo: 3.2, hi: 10, count: 2 },
      ],
      boxplot: { min: 1, q1: 1, median: 2, q3: 4, max: 10 },
      current: 10,
    });
    expect(svg).toContain('class="current"');
    expect(svg).toContain("rgb(239,85,59)");
    expect(svg.match(/class="hist-bin"/g)).toHaveLength(2);
  });

  const counts = {
    "L-L-L": 1,
    "L-L-H": 1,
    "L-H-L": 1,
    "H-L-L": 2,
    "L-H-H": 1,
    "H-L-H": 3,
    "H-H-L": 2,
    "H-H-H": 3,
  };

  it("renders rule 1 with dashed candidate links", () => {
    const lattice: LatticeReport = {
      pattern: "H-H-L",
      counts,
      primary_bar: { total: 3, segments: { "L-H-H": 1, "H-L-H": 3, "H-H-L": 2 } },
      secondary_bar: {
        rule: 1,
        height: 2,
        parts: [
          { pattern: "H-L-L", count: 2, fraction: 1.0, dashed: true },
          { pattern: "L-H-L", count: 1, fraction: 0.5, dashed: true },
        ],
      },
    };
    const svg = renderGranularityBars(lattice);
    expect(svg.match(/class="candidate-link"/g)).toHaveLength(2);
    expect(svg).toContain("stroke-dasharray");
    expect(svg.match(/class="primary-segment"/g)).toHaveLength(3);
  });

  it("renders rule 2 as top and bottom parent fractions", () => {
    const lattice: LatticeReport = {
      pattern: "L-L-H",
      counts,
      primary_bar: { total: 3, segments: { "L-H-H": 1, "H-L-H": 3, "H-H-L": 2 } },
      secondary_bar: {
        rule: 2,
        height: 1,
        parts: [
          { parent: "H-L-H", count: 3, fraction: 1 / 3 },
          { parent: "L-H-H", count: 1, fraction: 1.0 },
        ],
      },
    };
    const svg = renderGranularityBars(lattice);
    expect(svg.match(/class="secondary-bar"/g)).toHaveLength(2);
    expect(svg.match(/class="parent-link"/g)).toHaveLength(2);
  });
});
