"""HTTP/JSON service orchestrating the prune -> retrain -> compare cycle.

Serves predictions, interpretive paths, layer aggregates, embeddings and
ego networks from the active model; records strategy applications in an
append-only operations log; runs retraining as a single background job;
and supports activating any previous model for rollback comparison.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Response

from . import canonical, features, metapath
from .kg import EntityType, GraphError, KnowledgeGraph, Triple, ingest, write_snapshot
from .model import (
    ModelConfig,
    SplitConfig,
    TrainedModel,
    aggregate_layers,
    compile_graph,
    extract_paths,
    predictions_for,
    propagate,
    save_model,
    train,
)

HIGHLIGHT_CLASSES = (
    "disease",
    "predicted",
    "correct",
    "validated",
    "selected",
    "lasso",
    "none",
)


def derive_split_seed(base_seed: int, kg_version: int) -> int:
    """Fresh, reproducible split per retrain: metric deltas reflect the data."""
    digest = hashlib.blake2b(
        f"{base_seed}:{kg_version}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "little") % 2**31


@dataclass
class ModelState:
    version: int
    trained: TrainedModel
    kg_snapshot: KnowledgeGraph
    wall_seconds: float

    def __post_init__(self):
        self.cg = compile_graph(self.kg_snapshot)
        self.eindex = {e: i for i, e in enumerate(self.cg.entity_ids)}
        self.truth: dict[str, set[str]] = {}
        for t in self.kg_snapshot.triples():
            if t.relation == "SL_GsG":
                self.truth.setdefault(t.head, set()).add(t.tail)
                self.truth.setdefault(t.tail, set()).add(t.head)

    def log_entry(self, active: bool) -> dict:
        return {
            "version": self.version,
            "kg_version": self.trained.kg_version,
            "metrics": dict(self.trained.metrics),
            "wall_seconds": self.wall_seconds,
            "active": active,
        }


@dataclass
class OperationRecord:
    id: int
    timestamp: float
    strategies: list[dict]  # serialized strategy + matched count each
    note: str
    kg_version: int
    total_deleted: int
    fraction_deleted: float
    model_version: int | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "timestamp": self.timestamp,
            "strategies": self.strategies,
            "note": self.note,
            "kg_version": self.kg_version,
            "total_deleted": self.total_deleted,
            "fraction_deleted": self.fraction_deleted,
            "model_version": self.model_version,
        }


@dataclass
class SessionState:
    disease: str | None = None
    primary: str | None = None
    partners: list[str] = field(default_factory=list)


class WorkbenchService:
    """All server-side state; the FastAPI app is a thin routing layer."""

    def __init__(
        self,
        data_dir: str | Path,
        models_dir: str | Path,
        seed: int = 42,
        config: ModelConfig | None = None,
        auto_train: bool = True,
    ):
        self.data_dir = Path(data_dir)
        self.models_dir = Path(models_dir)
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.seed = seed
        self.base_config = config or ModelConfig(seed=seed)

        self.kg, self.ingest_report, self.diseases = ingest(
            self.data_dir / "entities.tsv",
            self.data_dir / "triples.tsv",
            self.data_dir / "diseases.tsv"
            if (self.data_dir / "diseases.tsv").exists()
            else None,
        )
        genes_meta = features.load_genes_tsv(self.data_dir / "genes.tsv")
        sequences = features.load_fasta(self.data_dir / "sequences.fasta")
        self.symbols = {g: sym for g, (sym, _) in genes_meta.items()}
        descriptions = {g: desc for g, (_, desc) in genes_meta.items()}
        feats = features.build_features(sequences, descriptions)
        self.embedding = (
            features.project_2d(
                [f.gene_id for f in feats],
                np.vstack([f.fused for f in feats]),
                seed=seed,
            )
            if len(feats) >= 2
            else []
        )

        self.session = SessionState()
        self.pending: dict[int, metapath.MetapathStrategy] = {}
        self._next_strategy_id = 1
        self.operations: list[OperationRecord] = []
        self._next_operation_id = 1
        self.registry: list[ModelState] = []
        self.active_version: int | None = None
        self._registry_lock = threading.Lock()
        self._job_lock = threading.Lock()
        self.jobs: dict[int, dict] = {}
        self._next_job_id = 1
        self._ops_path = self.models_dir / "operations.jsonl"

        if auto_train:
            self._train_new_model(activate=True)

    # -- model lifecycle ---------------------------------------------------

    def _train_new_model(self, activate: bool = False) -> ModelState:
        snapshot = self.kg.copy()
        cfg = self.base_config
        split_seed = derive_split_seed(self.seed, snapshot.version)
        t0 = time.perf_counter()
        trained = train(snapshot, SplitConfig(seed=split_seed), cfg)
        wall = time.perf_counter() - t0
        with self._registry_lock:
            version = len(self.registry) + 1
            state = ModelState(version, trained, snapshot, wall)
            self.registry.append(state)
            save_model(trained, self.models_dir / str(version))
            snap_dir = self.models_dir / str(version) / "kg"
            write_snapshot(snapshot, snap_dir)
            if activate or self.active_version is None:
                self.active_version = version
            for op in self.operations:
                if op.model_version is None:
                    op.model_version = version
                    self._append_ops_line(
                        {"type": "model", "operation_id": op.id, "model_version": version}
                    )
        return state

    def active_model(self) -> ModelState:
        if self.active_version is None:
            raise HTTPException(status_code=409, detail="no active model")
        return self.registry[self.active_version - 1]

    def model_by_version(self, version: int) -> ModelState:
        if not 1 <= version <= len(self.registry):
            raise HTTPException(status_code=404, detail=f"unknown model version {version}")
        return self.registry[version - 1]

    def start_retrain(self) -> int:
        if not self._job_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="retrain already running")
        job_id = self._next_job_id
        self._next_job_id += 1
        self.jobs[job_id] = {"status": "running", "model_version": None}

        def runner():
            try:
                state = self._train_new_model(activate=False)
                self.jobs[job_id] = {"status": "done", "model_version": state.version}
            except Exception as exc:  # pragma: no cover - surfaced via job status
                self.jobs[job_id] = {"status": "failed", "error": str(exc)}
            finally:
                self._job_lock.release()

        threading.Thread(target=runner, daemon=True).start()
        return job_id

    def retrain_running(self) -> bool:
        locked = self._job_lock.acquire(blocking=False)
        if locked:
            self._job_lock.release()
        return not locked

    # -- operations log ------------------------------------------------------

    def _append_ops_line(self, payload: dict):
        with open(self._ops_path, "a", encoding="utf-8") as fh:
            fh.write(canonical.dumps(payload) + "\n")

    def apply_pending(self, ids: list[int] | None, note: str) -> OperationRecord:
        if self.retrain_running():
            raise HTTPException(status_code=409, detail="retrain running; apply blocked")
        chosen = sorted(self.pending) if ids is None else ids
        strategies = []
        for sid in chosen:
            if sid not in self.pending:
                raise HTTPException(status_code=404, detail=f"unknown strategy {sid}")
            strategies.append(self.pending[sid])
        if not strategies:
            raise HTTPException(status_code=400, detail="no strategies to apply")
        write_snapshot(self.kg, self.models_dir / "snapshots")
        self.kg.snapshot()
        report = metapath.apply_strategies(strategies, self.kg)
        record = OperationRecord(
            id=self._next_operation_id,
            timestamp=time.time(),
            strategies=[
                {**o.strategy.to_json(), "matched": o.matched} for o in report.outcomes
            ],
            note=note,
            kg_version=report.new_version,
            total_deleted=report.total_deleted,
            fraction_deleted=report.fraction_deleted,
        )
        self._next_operation_id += 1
        self.operations.append(record)
        self._append_ops_line({"type": "operation", **record.to_json()})
        for sid in chosen:
            self.pending.pop(sid, None)
        return record

    # -- view payloads ---------------------------------------------------------

    def gene_or_404(self, gene_id: str):
        ent = self.kg.entities.get(gene_id)
        if ent is None or ent.etype is not EntityType.GENE:
            raise HTTPException(status_code=404, detail=f"unknown gene {gene_id!r}")
        return ent

    def autocomplete(self, query: str, limit: int = 20) -> list[dict]:
        if not query:
            return []
        q = query.lower()
        prefix, contains = [], []
        for gid, sym in self.symbols.items():
            s = sym.lower()
            if s.startswith(q):
                prefix.append((sym, gid))
            elif q in s:
                contains.append((sym, gid))
        ranked = sorted(prefix) + sorted(contains)
        return [{"id": gid, "symbol": sym} for sym, gid in ranked[:limit]]

    def predictions_payload(self, gene_id: str) -> list[dict]:
        self.gene_or_404(gene_id)
        state = self.active_model()
        if gene_id not in state.eindex:
            raise HTTPException(status_code=404, detail=f"{gene_id!r} not in model graph")
        preds = predictions_for(
            state.cg,
            state.trained.ent,
            state.trained.rel,
            state.eindex[gene_id],
            state.trained.config.top_k,
            state.truth.get(gene_id, set()),
        )
        return [
            {
                "partner": p.partner,
                "name": self.kg.entities[p.partner].name
                if p.partner in self.kg.entities
                else p.partner,
                "score": p.score,
                "rank": p.rank,
                "correct": p.correct,
            }
            for p in preds
        ]

    def paths_payload(
        self, gene_id: str, partners: list[str] | None, max_paths: int | None = None
    ) -> dict:
        self.gene_or_404(gene_id)
        state = self.active_model()
        if partners is None:
            partners = [row["partner"] for row in self.predictions_payload(gene_id)]
        for p in partners:
            if p not in state.eindex:
                raise HTTPException(status_code=404, detail=f"unknown partner {p!r}")
        limit = max_paths or state.trained.config.max_paths_per_partner
        prop = propagate(
            state.cg,
            state.trained.ent,
            state.trained.rel,
            state.eindex[gene_id],
            state.trained.config.hops,
        )
        raw = extract_paths(
            state.cg, prop, [state.eindex[p] for p in partners], max_paths=limit
        )
        return {
            state.cg.entity_ids[pid]: [p.to_json() for p in plist]
            for pid, plist in raw.items()
        }

    def aggregate_payload(self, gene_id: str, partners: list[str] | None) -> dict:
        paths = self.paths_payload(gene_id, partners)
        from .model import InterpretivePath

        flat = [
            InterpretivePath(p["nodes"], p["relations"], p["weight"])
            for plist in paths.values()
            for p in plist
        ]
        agg = aggregate_layers(flat, self.kg)
        return agg.to_json()

    def embedding_payload(self, disease: str | None, primary: str | None) -> list[dict]:
        disease_genes: set[str] = set()
        if disease:
            if disease not in self.diseases:
                raise HTTPException(status_code=404, detail=f"unknown disease {disease!r}")
            disease_genes = self.diseases[disease].gene_ids
        predicted: dict[str, int] = {}
        correct: set[str] = set()
        validated: set[str] = set()
        if primary:
            self.gene_or_404(primary)
            state = self.active_model()
            validated = set(state.truth.get(primary, set()))
            for row in self.predictions_payload(primary):
                predicted[row["partner"]] = row["rank"]
                if row["correct"]:
                    correct.add(row["partner"])
        tagged = set(self.session.partners)
        out = []
        for pt in self.embedding:
            gid = pt.gene_id
            if gid == primary:
                cls = "selected"
            elif gid in tagged and gid in predicted:
                cls = "selected"
            elif gid in correct:
                cls = "correct"
            elif gid in predicted:
                cls = "predicted"
            elif gid in validated and primary:
                cls = "validated"
            elif gid in disease_genes:
                cls = "disease"
            else:
                cls = "none"
            row = {"gene_id": gid, "x": pt.x, "y": pt.y, "highlight": cls}
            if gid in predicted:
                row["rank"] = predicted[gid]
                row["tagged"] = gid in tagged
            out.append(row)
        return out

    def ego_payload(self, gene_id: str, hops: int) -> dict:
        self.gene_or_404(gene_id)
        ego = self.kg.ego_subgraph(gene_id, hops)
        return {
            "center": ego.center,
            "rings": ego.rings,
            "transitions": [[t.as_dict() for t in layer] for layer in ego.transitions],
        }


# -- FastAPI wiring -------------------------------------------------------------


def _respond(payload) -> Response:
    return Response(content=canonical.dump_bytes(payload), media_type="application/json")


def create_app(service: WorkbenchService) -> FastAPI:
    app = FastAPI(title="slworkbench", version="0.1.0")
    app.state.service = service

    @app.get("/health")
    def health():
        return _respond({"status": "ok", "kg_version": service.kg.version})

    @app.get("/genes")
    def genes(q: str = ""):
        return _respond(service.autocomplete(q))

    @app.get("/entities")
    def entities(ids: str = ""):
        out = []
        for eid in [e for e in ids.split(",") if e]:
            ent = service.kg.entities.get(eid)
            if ent is None:
                raise HTTPException(status_code=404, detail=f"unknown entity {eid!r}")
            out.append({"id": ent.id, "etype": ent.etype.value, "name": ent.name})
        return _respond(out)

    @app.get("/diseases")
    def diseases():
        return _respond(
            [
                {"id": d.disease_id, "name": d.name, "gene_count": len(d.gene_ids)}
                for d in sorted(service.diseases.values(), key=lambda d: d.disease_id)
            ]
        )

    @app.get("/diseases/{disease_id}/genes")
    def disease_genes(disease_id: str):
        if disease_id not in service.diseases:
            raise HTTPException(status_code=404, detail=f"unknown disease {disease_id!r}")
        return _respond(sorted(service.diseases[disease_id].gene_ids))

    @app.get("/genes/{gene_id}/predictions")
    def predictions(gene_id: str):
        return _respond(service.predictions_payload(gene_id))

    @app.get("/genes/{gene_id}/paths")
    def paths(gene_id: str, partners: str = "", max_paths: int = 0):
        plist = [p for p in partners.split(",") if p] or None
        return _respond(service.paths_payload(gene_id, plist, max_paths or None))

    @app.get("/genes/{gene_id}/aggregate")
    def aggregate(gene_id: str, partners: str = ""):
        plist = [p for p in partners.split(",") if p] or None
        return _respond(service.aggregate_payload(gene_id, plist))

    @app.get("/embedding")
    def embedding(disease: str = "", primary: str = ""):
        return _respond(service.embedding_payload(disease or None, primary or None))

    @app.get("/kg/ego/{gene_id}")
    def ego(gene_id: str, hops: int = 2):
        try:
            return _respond(service.ego_payload(gene_id, hops))
        except GraphError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/session")
    def session():
        return _respond(
            {
                "disease": service.session.disease,
                "primary": service.session.primary,
                "partners": list(service.session.partners),
                "pending_strategies": sorted(service.pending),
                "active_model": service.active_version,
            }
        )

    @app.post("/session/selections")
    def select(body: dict):
        if "disease" in body:
            d = body["disease"]
            if d and d not in service.diseases:
                raise HTTPException(status_code=404, detail=f"unknown disease {d!r}")
            service.session.disease = d or None
        if "primary" in body:
            p = body["primary"]
            if p:
                service.gene_or_404(p)
            service.session.primary = p or None
        if "partners" in body:
            for g in body["partners"]:
                service.gene_or_404(g)
            service.session.partners = list(body["partners"])
        return session()

    @app.post("/strategies")
    def formulate(body: dict):
        anchor = body.get("anchor", {})
        triple = Triple(anchor.get("head", ""), anchor.get("relation", ""), anchor.get("tail", ""))
        if not service.kg.has_triple(triple):
            raise HTTPException(status_code=404, detail=f"anchor triple {triple} not in graph")
        try:
            strategy = metapath.strategy_from_anchor(
                service.kg, triple, body.get("pattern", "L-L-L")
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        sid = service._next_strategy_id
        service._next_strategy_id += 1
        service.pending[sid] = strategy
        report = metapath.lattice_report(strategy, service.kg)
        return _respond(
            {
                "id": sid,
                "strategy": strategy.to_json(),
                "lattice": report.to_json(),
                "source_stats": metapath.slot_stats(strategy, "source", service.kg).to_json(),
                "target_stats": metapath.slot_stats(strategy, "target", service.kg).to_json(),
            }
        )

    @app.get("/strategies")
    def pending():
        return _respond(
            [{"id": sid, **service.pending[sid].to_json()} for sid in sorted(service.pending)]
        )

    @app.delete("/strategies/{sid}")
    def drop_strategy(sid: int):
        if sid not in service.pending:
            raise HTTPException(status_code=404, detail=f"unknown strategy {sid}")
        del service.pending[sid]
        return _respond({"removed": sid})

    @app.post("/strategies/apply")
    def apply(body: dict):
        record = service.apply_pending(body.get("ids"), body.get("note", ""))
        return _respond(record.to_json())

    @app.post("/retrain")
    def retrain():
        job_id = service.start_retrain()
        return _respond({"job_id": job_id})

    @app.get("/retrain/{job_id}")
    def job(job_id: int):
        if job_id not in service.jobs:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        return _respond(service.jobs[job_id])

    @app.get("/models")
    def models():
        return _respond(
            [
                state.log_entry(active=state.version == service.active_version)
                for state in service.registry
            ]
        )

    @app.post("/models/{version}/activate")
    def activate(version: int):
        service.model_by_version(version)
        service.active_version = version
        return models()

    @app.get("/operations")
    def operations():
        return _respond([op.to_json() for op in service.operations])

    @app.patch("/operations/{op_id}/note")
    def edit_note(op_id: int, body: dict):
        for op in service.operations:
            if op.id == op_id:
                op.note = body.get("note", "")
                service._append_ops_line(
                    {"type": "note", "id": op_id, "note": op.note, "timestamp": time.time()}
                )
                return _respond(op.to_json())
        raise HTTPException(status_code=404, detail=f"unknown operation {op_id}")

    return app
