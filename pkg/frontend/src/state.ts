// ── View state and the steering controller ──────────────────────────────────
// Mirrors the server's session: selections live on the server so highlight
// classes in payloads stay authoritative; the controller only orchestrates
// calls and caches the latest payloads for the views.

import {
  ApiClient,
  Disease,
  EmbeddingPoint,
  LayerAggregate,
  ModelLogEntry,
  OperationRecord,
  PredictionRow,
  StrategyReport,
} from "./api.js";

export interface ViewState {
  disease: string | null;
  primary: string | null;
  partners: string[];
  lasso: string[];
  hovered: string | null;
  pendingStrategies: StrategyReport[];
  activeModel: number | null;
  retrainRunning: boolean;
  diseases: Disease[];
  predictions: PredictionRow[];
  embedding: EmbeddingPoint[];
  aggregate: LayerAggregate | null;
  operations: OperationRecord[];
  models: ModelLogEntry[];
}

export function emptyState(): ViewState {
  return {
    disease: null,
    primary: null,
    partners: [],
    lasso: [],
    hovered: null,
    pendingStrategies: [],
    activeModel: null,
    retrainRunning: false,
    diseases: [],
    predictions: [],
    embedding: [],
    aggregate: null,
    operations: [],
    models: [],
  };
}

type Listener = (state: ViewState) => void;

export class SessionController {
  readonly state: ViewState = emptyState();
  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit() {
    for (const fn of this.listeners) fn(this.state);
  }

  async bootstrap() {
    const [diseases, models, operations, session] = await Promise.all([
      this.api.diseases(),
      this.api.models(),
      this.api.operations(),
      this.api.session(),
    ]);
    this.state.diseases = diseases;
    this.state.models = models;
    this.state.operations = operations;
    this.state.activeModel = session.active_model;
    this.state.embedding = await this.api.embedding();
    this.emit();
  }

  async selectDisease(disease: string | null) {
    await this.api.select({ disease });
    this.state.disease = disease;
    this.state.embedding = await this.api.embedding(
      disease ?? undefined,
      this.state.primary ?? undefined,
    );
    this.emit();
  }

  async selectPrimary(primary: string | null) {
    await this.api.select({ primary, partners: [] });
    this.state.primary = primary;
    this.state.partners = [];
    if (primary) {
      this.state.predictions = await this.api.predictions(primary);
      this.state.aggregate = await this.api.aggregate(primary);
    } else {
      this.state.predictions = [];
      this.state.aggregate = null;
    }
    this.state.embedding = await this.api.embedding(
      this.state.disease ?? undefined,
      primary ?? undefined,
    );
    this.emit();
  }

  /** Toggle a partner tag; the aggregate rescopes to the tagged partners. */
  async togglePartner(partner: string) {
    const tags = this.state.partners.includes(partner)
      ? this.state.partners.filter((p) => p !== partner)
      : [...this.state.partners, partner];
    await this.api.select({ partners: tags });
    this.state.partners = tags;
    if (this.state.primary) {
      this.state.aggregate = await this.api.aggregate(this.state.primary, tags);
      this.state.embedding = await this.api.embedding(
        this.state.disease ?? undefined,
        this.state.primary,
      );
    }
    this.emit();
  }

  setLasso(geneIds: string[]) {
    this.state.lasso = geneIds;
    this.emit();
  }

  async formulate(anchor: { head: string; relation: string; tail: string }, pattern: string) {
    const report = await this.api.formulate(anchor, pattern);
    this.state.pendingStrategies.push(report);
    this.emit();
    return report;
  }

  async dropStrategy(id: number) {
    await this.api.dropStrategy(id);
    this.state.pendingStrategies = this.state.pendingStrategies.filter((s) => s.id !== id);
    this.emit();
  }

  async applyStrategies(ids: number[], note: string) {
    const record = await this.api.applyStrategies(ids, note);
    this.state.pendingStrategies = this.state.pendingStrategies.filter(
      (s) => !ids.includes(s.id),
    );
    this.state.operations = await this.api.operations();
    this.emit();
    return record;
  }

  /** Kick off a retrain and poll to completion; controls stay disabled. */
  async retrainAndWait(pollMs = 150, timeoutMs = 600_000): Promise<number> {
    const { job_id } = await this.api.retrain();
    this.state.retrainRunning = true;
    this.emit();
    const deadline = Date.now() + timeoutMs;
    try {
      for (;;) {
        const status = await this.api.retrainStatus(job_id);
        if (status.status === "done") {
          this.state.models = await this.api.models();
          this.state.operations = await this.api.operations();
          return status.model_version!;
        }
        if (status.status === "failed") throw new Error("retrain failed");
        if (Date.now() > deadline) throw new Error("retrain timed out");
        await new Promise((resolve) => setTimeout(resolve, pollMs));
      }
    } finally {
      this.state.retrainRunning = false;
      this.emit();
    }
  }

  async activateModel(version: number) {
    this.state.models = await this.api.activate(version);
    this.state.activeModel = version;
    if (this.state.primary) {
      this.state.predictions = await this.api.predictions(this.state.primary);
      this.state.aggregate = await this.api.aggregate(
        this.state.primary,
        this.state.partners,
      );
      this.state.embedding = await this.api.embedding(
        this.state.disease ?? undefined,
        this.state.primary,
      );
    }
    this.emit();
  }
}
