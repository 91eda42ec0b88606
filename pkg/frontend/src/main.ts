// ── Browser bootstrap wiring the four coordinated views ─────────────────────

import { ApiClient } from "./api.js";
import { radarGlyph } from "./geometry/glyph.js";
import { SessionController } from "./state.js";
import { lassoSelect, renderEmbedding } from "./views/embedding.js";
import { connectedEntities, renderInterpretation } from "./views/interpretation.js";
import { renderEgoNetwork, renderMetapathBox } from "./views/modifier.js";
import { renderModelLog, renderOperationList, renderPartnerTable } from "./views/session.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function start() {
  const api = new ApiClient("");
  const controller = new SessionController(api);
  const etypeCache: Record<string, string> = {};
  let highlighted: Set<string> | undefined;
  let currentPaths: { nodes: string[] }[] = [];

  async function etypesFor(ids: string[]): Promise<Record<string, string>> {
    const missing = ids.filter((id) => !(id in etypeCache));
    if (missing.length) {
      for (const e of await api.entities(missing)) etypeCache[e.id] = e.etype;
    }
    return etypeCache;
  }

  async function redraw() {
    const s = controller.state;
    el("partner-table").innerHTML = renderPartnerTable(s.predictions, s.partners);
    el("operation-list").innerHTML = renderOperationList(s.pendingStrategies, s.operations);
    el("model-log").innerHTML = renderModelLog(s.models);
    el("embedding-view").innerHTML = renderEmbedding(s.embedding, s.primary);
    if (s.aggregate) {
      const ids = s.aggregate.layers.flatMap((layer) => Object.keys(layer));
      el("interpretation-view").innerHTML = renderInterpretation(
        s.aggregate,
        await etypesFor(ids),
        { highlighted },
      );
    } else {
      el("interpretation-view").innerHTML = "";
    }
    if (s.primary) {
      el("modifier-kg").innerHTML = renderEgoNetwork(await api.ego(s.primary));
    }
    const busy = s.retrainRunning;
    for (const id of ["confirm-strategies", "retrain"]) {
      const btn = document.getElementById(id) as HTMLButtonElement | null;
      if (btn) btn.disabled = busy || (id === "retrain" && busy);
    }
  }

  controller.subscribe(() => void redraw());
  await controller.bootstrap();

  const diseaseBox = el("disease-search") as HTMLInputElement;
  diseaseBox.addEventListener("change", () => {
    void controller.selectDisease(diseaseBox.value || null);
  });
  const primaryBox = el("primary-search") as HTMLInputElement;
  primaryBox.addEventListener("change", () => {
    void controller.selectPrimary(primaryBox.value || null);
  });

  el("partner-table").addEventListener("click", (ev) => {
    const row = (ev.target as HTMLElement).closest("tr[data-partner]");
    if (row) void controller.togglePartner(row.getAttribute("data-partner")!);
  });

  el("model-log").addEventListener("click", (ev) => {
    const group = (ev.target as HTMLElement).closest(".model[data-model]");
    if (group) void controller.activateModel(Number(group.getAttribute("data-model")));
  });

  el("operation-list").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.id === "confirm-strategies") {
      const checked = [
        ...el("operation-list").querySelectorAll<HTMLInputElement>("input[data-check]:checked"),
      ].map((inp) => Number(inp.dataset.check));
      const note = (el("operation-note") as HTMLTextAreaElement).value;
      void controller
        .applyStrategies(checked, note)
        .then(() => controller.retrainAndWait());
    } else if (target.dataset.drop) {
      void controller.dropStrategy(Number(target.dataset.drop));
    }
  });

  el("modifier-kg").addEventListener("click", async (ev) => {
    const edge = (ev.target as HTMLElement).closest(".ego-edge");
    if (!edge) return;
    const anchor = {
      head: edge.getAttribute("data-head")!,
      relation: edge.getAttribute("data-relation")!,
      tail: edge.getAttribute("data-tail")!,
    };
    const report = await controller.formulate(anchor, "L-L-L");
    await etypesFor([anchor.head, anchor.tail]);
    el("metapath-box").innerHTML = renderMetapathBox(report, etypeCache);
  });

  el("interpretation-view").addEventListener("click", async (ev) => {
    const cell = (ev.target as HTMLElement).closest(".cell[data-entity]");
    if (!cell || !controller.state.primary) return;
    const clicked = cell.getAttribute("data-entity")!;
    if (!currentPaths.length) {
      const byPartner = await api.paths(controller.state.primary);
      currentPaths = Object.values(byPartner).flat();
    }
    highlighted = connectedEntities(currentPaths, clicked);
    void redraw();
  });

  // freehand lasso over the embedding svg
  let lassoPts: { x: number; y: number }[] = [];
  const embeddingView = el("embedding-view");
  embeddingView.addEventListener("mousedown", (ev) => {
    lassoPts = [{ x: (ev as MouseEvent).offsetX, y: (ev as MouseEvent).offsetY }];
  });
  embeddingView.addEventListener("mousemove", (ev) => {
    if (lassoPts.length) {
      lassoPts.push({ x: (ev as MouseEvent).offsetX, y: (ev as MouseEvent).offsetY });
    }
  });
  embeddingView.addEventListener("mouseup", () => {
    if (lassoPts.length > 2) {
      const svgPoints = [
        ...embeddingView.querySelectorAll<SVGCircleElement>("circle[data-gene]"),
      ].map((c) => ({
        gene_id: c.dataset.gene!,
        x: Number(c.getAttribute("cx")),
        y: Number(c.getAttribute("cy")),
      }));
      controller.setLasso(lassoSelect(svgPoints, lassoPts));
    }
    lassoPts = [];
  });

  const retrainBtn = document.getElementById("retrain");
  retrainBtn?.addEventListener("click", () => void controller.retrainAndWait());
}

if (typeof document !== "undefined" && document.getElementById("workbench-app")) {
  void start();
}
