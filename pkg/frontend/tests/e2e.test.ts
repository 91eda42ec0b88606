// End-to-end steering over a live backend: select a disease and a primary
// gene, formulate the planted-noise strategy, apply it, retrain, and switch
// models; afterwards the operation list holds one record and the model log
// two entries with exactly one active.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/state.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

const CORPUS_SPEC = {
  genes: 60,
  bps: 30,
  pathways: 8,
  mfs: 6,
  ccs: 6,
  cluster_size: 15,
  cluster_bp_pool: 6,
  bps_per_gene: 4,
  seed: 7,
  seq_len: 120,
};

const MODEL_CONFIG = { embed_dim: 16, epochs: 3, top_k: 10, max_paths_per_partner: 20 };

let server: ChildProcess;
let dataDir: string;

async function waitForHealth(timeoutMs = 120_000) {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/health`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}

beforeAll(async () => {
  const work = mkdtempSync(join(tmpdir(), "wb-e2e-"));
  dataDir = join(work, "data");
  const specFile = join(work, "spec.json");
  writeFileSync(specFile, JSON.stringify(CORPUS_SPEC));
  execFileSync("python3", [
    "-m",
    "slworkbench.cli",
    "datagen",
    "--spec",
    specFile,
    "--out",
    dataDir,
  ]);
  const cfgFile = join(work, "model.json");
  writeFileSync(cfgFile, JSON.stringify(MODEL_CONFIG));
  server = spawn(
    "python3",
    [
      "-m",
      "slworkbench.cli",
      "serve",
      "--data",
      dataDir,
      "--models",
      join(work, "models"),
      "--port",
      String(PORT),
      "--seed",
      "5",
      "--config",
      cfgFile,
    ],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForHealth();
}, 180_000);

afterAll(() => {
  server?.kill();
});

describe("scripted steering flow", () => {
  it("runs select -> formulate -> apply -> retrain -> switch model", async () => {
    const api = new ApiClient(BASE);
    const controller = new SessionController(api);
    await controller.bootstrap();
    expect(controller.state.models).toHaveLength(1);
    expect(controller.state.activeModel).toBe(1);

    // select a disease, then a primary gene from it
    const disease = controller.state.diseases[0];
    await controller.selectDisease(disease.id);
    const diseaseGenes = await api.diseaseGenes(disease.id);
    const primary = diseaseGenes[0];
    await controller.selectPrimary(primary);
    expect(controller.state.predictions.length).toBeGreaterThan(0);
    expect(controller.state.embedding.some((p) => p.highlight !== "none")).toBe(true);

    // formulate the planted-noise strategy from the generator manifest
    const manifest = JSON.parse(readFileSync(join(dataDir, "manifest.json"), "utf-8"));
    const noiseBp: string = manifest.noise.bp_ids[0];
    const fwd = manifest.noise.triples.find((t: string[]) => t[2] === noiseBp)!;
    const report = await controller.formulate(
      { head: fwd[0], relation: fwd[1], tail: fwd[2] },
      "H-H-L",
    );
    expect(report.lattice.counts["L-L-L"]).toBe(1);
    expect(controller.state.pendingStrategies).toHaveLength(1);

    // apply, retrain, and activate the new model
    const record = await controller.applyStrategies(
      [report.id],
      "noise endpoint pruned in e2e",
    );
    expect(record.total_deleted).toBe(manifest.noise.triple_count);
    const newVersion = await controller.retrainAndWait(100);
    expect(newVersion).toBe(2);
    await controller.activateModel(newVersion);

    // postconditions: one operation record; two models, exactly one active
    expect(controller.state.operations).toHaveLength(1);
    expect(controller.state.operations[0].note).toBe("noise endpoint pruned in e2e");
    expect(controller.state.operations[0].model_version).toBe(2);
    expect(controller.state.models).toHaveLength(2);
    expect(controller.state.models.filter((m) => m.active)).toHaveLength(1);
    expect(controller.state.models.find((m) => m.active)!.version).toBe(2);

    // the pruned endpoint is gone from every served path
    const paths = await api.paths(primary);
    for (const plist of Object.values(paths)) {
      for (const p of plist) {
        expect(p.nodes).not.toContain(noiseBp);
      }
    }
  }, 240_000);
});
