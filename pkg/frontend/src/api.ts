// ── Typed client over the workbench HTTP API ────────────────────────────────
// Every count, score, rank and correctness flag shown anywhere in the UI
// comes verbatim from these payloads; nothing is recomputed client-side.

import type { HighlightClass } from "./palette.js";

export interface GeneHit {
  id: string;
  symbol: string;
}

export interface Disease {
  id: string;
  name: string;
  gene_count: number;
}

export interface PredictionRow {
  partner: string;
  name: string;
  score: number;
  rank: number;
  correct: boolean;
}

export interface InterpretivePath {
  nodes: string[];
  relations: string[];
  weight: number;
}

export interface LayerAggregate {
  layers: Record<string, number>[];
  flows: Record<string, Record<string, number>>[];
  relation_mix: Record<string, number>[];
}

export interface EmbeddingPoint {
  gene_id: string;
  x: number;
  y: number;
  highlight: HighlightClass;
  rank?: number;
  tagged?: boolean;
}

export interface EgoPayload {
  center: string;
  rings: Record<string, string[]>[];
  transitions: { head: string; relation: string; tail: string }[][];
}

export interface LatticeReport {
  pattern: string;
  counts: Record<string, number>;
  primary_bar: { total: number; segments: Record<string, number> };
  secondary_bar: null | { rule: number; height: number; parts: Record<string, unknown>[] };
}

export interface SlotStats {
  slot: string;
  histogram: { lo: number; hi: number; count: number }[];
  boxplot: { min: number; q1: number; median: number; q3: number; max: number };
  current: number;
}

export interface StrategyReport {
  id: number;
  strategy: { anchor: { head: string; relation: string; tail: string }; pattern: string };
  lattice: LatticeReport;
  source_stats: SlotStats;
  target_stats: SlotStats;
}

export interface OperationRecord {
  id: number;
  timestamp: number;
  strategies: Record<string, unknown>[];
  note: string;
  kg_version: number;
  total_deleted: number;
  fraction_deleted: number;
  model_version: number | null;
}

export interface ModelLogEntry {
  version: number;
  kg_version: number;
  metrics: Record<string, number>;
  wall_seconds: number;
  active: boolean;
}

export interface SessionPayload {
  disease: string | null;
  primary: string | null;
  partners: string[];
  pending_strategies: number[];
  active_model: number | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!resp.ok) {
      throw new ApiError(resp.status, `${path}: ${await resp.text()}`);
    }
    return (await resp.json()) as T;
  }

  searchGenes(q: string): Promise<GeneHit[]> {
    return this.request(`/genes?q=${encodeURIComponent(q)}`);
  }

  entities(ids: string[]): Promise<{ id: string; etype: string; name: string }[]> {
    return this.request(`/entities?ids=${ids.map(encodeURIComponent).join(",")}`);
  }

  diseases(): Promise<Disease[]> {
    return this.request("/diseases");
  }

  diseaseGenes(id: string): Promise<string[]> {
    return this.request(`/diseases/${encodeURIComponent(id)}/genes`);
  }

  predictions(gene: string): Promise<PredictionRow[]> {
    return this.request(`/genes/${encodeURIComponent(gene)}/predictions`);
  }

  paths(gene: string, partners: string[] = []): Promise<Record<string, InterpretivePath[]>> {
    const q = partners.length ? `?partners=${partners.map(encodeURIComponent).join(",")}` : "";
    return this.request(`/genes/${encodeURIComponent(gene)}/paths${q}`);
  }

  aggregate(gene: string, partners: string[] = []): Promise<LayerAggregate> {
    const q = partners.length ? `?partners=${partners.map(encodeURIComponent).join(",")}` : "";
    return this.request(`/genes/${encodeURIComponent(gene)}/aggregate${q}`);
  }

  embedding(disease?: string, primary?: string): Promise<EmbeddingPoint[]> {
    const params = new URLSearchParams();
    if (disease) params.set("disease", disease);
    if (primary) params.set("primary", primary);
    const q = params.toString();
    return this.request(`/embedding${q ? "?" + q : ""}`);
  }

  ego(gene: string, hops = 2): Promise<EgoPayload> {
    return this.request(`/kg/ego/${encodeURIComponent(gene)}?hops=${hops}`);
  }

  session(): Promise<SessionPayload> {
    return this.request("/session");
  }

  select(sel: { disease?: string | null; primary?: string | null; partners?: string[] }) {
    return this.request<SessionPayload>("/session/selections", {
      method: "POST",
      body: JSON.stringify(sel),
    });
  }

  formulate(anchor: { head: string; relation: string; tail: string }, pattern: string) {
    return this.request<StrategyReport>("/strategies", {
      method: "POST",
      body: JSON.stringify({ anchor, pattern }),
    });
  }

  dropStrategy(id: number) {
    return this.request<{ removed: number }>(`/strategies/${id}`, { method: "DELETE" });
  }

  applyStrategies(ids: number[], note: string): Promise<OperationRecord> {
    return this.request("/strategies/apply", {
      method: "POST",
      body: JSON.stringify({ ids, note }),
    });
  }

  retrain(): Promise<{ job_id: number }> {
    return this.request("/retrain", { method: "POST" });
  }

  retrainStatus(jobId: number): Promise<{ status: string; model_version: number | null }> {
    return this.request(`/retrain/${jobId}`);
  }

  models(): Promise<ModelLogEntry[]> {
    return this.request("/models");
  }

  activate(version: number): Promise<ModelLogEntry[]> {
    return this.request(`/models/${version}/activate`, { method: "POST" });
  }

  operations(): Promise<OperationRecord[]> {
    return this.request("/operations");
  }

  editNote(id: number, note: string): Promise<OperationRecord> {
    return this.request(`/operations/${id}/note`, {
      method: "PATCH",
      body: JSON.stringify({ note }),
    });
  }
}
