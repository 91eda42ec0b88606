import json
import time

import pytest
from fastapi.testclient import TestClient

from slworkbench.model import ModelConfig
from slworkbench.service import WorkbenchService, create_app

TINY_CFG = ModelConfig(embed_dim=16, epochs=3, seed=5, top_k=10, max_paths_per_partner=20)


@pytest.fixture(scope="module")
def workbench(small_corpus, tmp_path_factory):
    corpus_dir, manifest = small_corpus
    models = tmp_path_factory.mktemp("models")
    service = WorkbenchService(corpus_dir, models, seed=5, config=TINY_CFG)
    client = TestClient(create_app(service))
    return client, service, manifest


def wait_for_job(client, job_id, timeout=120.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        status = client.get(f"/retrain/{job_id}").json()
        if status["status"] != "running":
            return status
        time.sleep(0.05)
    raise TimeoutError("retrain job did not finish")


def first_noise_anchor(manifest):
    noise_bp = manifest["noise"]["bp_ids"][0]
    return next(t for t in manifest["noise"]["triples"] if t[2] == noise_bp)


class TestSearchEndpoints:
    def test_autocomplete_prefix_before_substring(self, tmp_path):
        # hand fixture with symbols exercising the ordering rule
        (tmp_path / "entities.tsv").write_text(
            "CDK1\tGene\tCDK1\nCDK2\tGene\tCDK2\nXCDK9\tGene\tXCDK9\nB1\tBP\tprocess\n"
        )
        (tmp_path / "triples.tsv").write_text("")
        (tmp_path / "diseases.tsv").write_text(
            "d1\tsarcoma_7\tCDK1\nd1\tsarcoma_7\tCDK2\n"
        )
        (tmp_path / "genes.tsv").write_text(
            "CDK1\tCDK1\tkinase one\nCDK2\tCDK2\tkinase two\nXCDK9\tXCDK9\tother kinase\n"
        )
        (tmp_path / "sequences.fasta").write_text(
            ">CDK1\nACGTACGT\n>CDK2\nTTGTACGT\n>XCDK9\nGGGTACGT\n"
        )
        service = WorkbenchService(tmp_path, tmp_path / "m", seed=1, auto_train=False)
        client = TestClient(create_app(service))
        hits = client.get("/genes", params={"q": "cdk"}).json()
        assert [h["symbol"] for h in hits] == ["CDK1", "CDK2", "XCDK9"]
        assert client.get("/genes", params={"q": ""}).json() == []
        # no active model yet
        assert client.get("/genes/CDK1/predictions").status_code == 409
        # disease fixture: exactly the gene set from diseases.tsv
        assert client.get("/diseases/d1/genes").json() == ["CDK1", "CDK2"]

    def test_disease_listing(self, workbench):
        client, _, manifest = workbench
        diseases = client.get("/diseases").json()
        assert len(diseases) == manifest["counts"]["diseases"]
        genes = client.get(f"/diseases/{diseases[0]['id']}/genes").json()
        assert genes == sorted(genes) and len(genes) > 0

    def test_unknown_disease_404(self, workbench):
        client, _, _ = workbench
        assert client.get("/diseases/nope/genes").status_code == 404


class TestPredictionEndpoints:
    def test_contract(self, workbench):
        client, service, _ = workbench
        rows = client.get("/genes/G000/predictions").json()
        assert 1 <= len(rows) <= TINY_CFG.top_k
        assert [r["rank"] for r in rows] == list(range(1, len(rows) + 1))
        scores = [r["score"] for r in rows]
        assert scores == sorted(scores, reverse=True)
        assert all(set(r) == {"partner", "name", "score", "rank", "correct"} for r in rows)

    def test_unknown_gene_404(self, workbench):
        client, _, _ = workbench
        assert client.get("/genes/NOPE/predictions").status_code == 404

    def test_repeat_request_byte_identical(self, workbench):
        client, _, _ = workbench
        a = client.get("/genes/G001/predictions").content
        b = client.get("/genes/G001/predictions").content
        assert a == b

    def test_paths_reference_kg_triples(self, workbench):
        client, service, _ = workbench
        rows = client.get("/genes/G000/predictions").json()
        partner = rows[0]["partner"]
        payload = client.get(
            "/genes/G000/paths", params={"partners": partner}
        ).json()
        assert set(payload) == {partner}
        for p in payload[partner]:
            assert p["nodes"][0] == "G000" and p["nodes"][-1] == partner
            assert 0 < p["weight"] <= 1.0
            assert len(p["relations"]) == len(p["nodes"]) - 1

    def test_aggregate_defaults_to_all_partners(self, workbench):
        client, _, _ = workbench
        agg = client.get("/genes/G000/aggregate").json()
        assert agg["layers"], "expected at least one populated layer"
        for layer in agg["layers"]:
            assert sum(layer.values()) == pytest.approx(1.0, abs=1e-9)
        for mix in agg["relation_mix"]:
            if mix:
                assert sum(mix.values()) == pytest.approx(1.0, abs=1e-9)

    def test_ego_matches_kg_store(self, workbench):
        client, service, _ = workbench
        payload = client.get("/kg/ego/G000", params={"hops": 2}).json()
        ego = service.kg.ego_subgraph("G000", 2)
        assert payload["rings"] == [
            {k: v for k, v in ring.items()} for ring in ego.rings
        ]
        assert client.get("/kg/ego/G000", params={"hops": 3}).status_code == 400


class TestEmbeddingEndpoint:
    def test_highlight_classes(self, workbench):
        client, service, manifest = workbench
        disease = client.get("/diseases").json()[0]["id"]
        primary = "G000"
        rows = client.get("/genes/G000/predictions").json()
        partner = rows[0]["partner"]
        client.post("/session/selections", json={"partners": [partner]})
        pts = client.get(
            "/embedding", params={"disease": disease, "primary": primary}
        ).json()
        by_id = {p["gene_id"]: p for p in pts}
        assert by_id[primary]["highlight"] == "selected"
        assert by_id[partner]["highlight"] == "selected"
        assert by_id[partner]["tagged"] is True
        predicted = {r["partner"] for r in rows}
        validated = service.registry[service.active_version - 1].truth.get(primary, set())
        disease_genes = service.diseases[disease].gene_ids
        for gid, p in by_id.items():
            if gid == primary or gid in predicted:
                continue
            if gid in validated:
                assert p["highlight"] == "validated"
            elif gid in disease_genes:
                assert p["highlight"] == "disease"
            else:
                assert p["highlight"] == "none"
        correct = {r["partner"] for r in rows if r["correct"]}
        for gid in correct - {partner}:
            assert by_id[gid]["highlight"] == "correct"
        for gid in predicted - correct - {partner}:
            assert by_id[gid]["highlight"] == "predicted"
            assert by_id[gid]["rank"] >= 1
        client.post("/session/selections", json={"partners": []})

    def test_points_cover_all_genes(self, workbench):
        client, service, manifest = workbench
        pts = client.get("/embedding").json()
        assert len(pts) == manifest["counts"]["genes"]
        assert all(p["highlight"] == "none" for p in pts)


class TestStrategyAndCycle:
    def test_full_cycle(self, workbench):
        client, service, manifest = workbench
        anchor = first_noise_anchor(manifest)
        # formulate
        resp = client.post(
            "/strategies",
            json={
                "anchor": {"head": anchor[0], "relation": anchor[1], "tail": anchor[2]},
                "pattern": "H-H-L",
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        sid = body["id"]
        assert body["lattice"]["counts"]["L-L-L"] == 1
        assert body["lattice"]["secondary_bar"]["rule"] == 1
        assert body["target_stats"]["current"] >= 1
        assert client.get("/session").json()["pending_strategies"] == [sid]

        # golden responses recorded under model v1
        replay = [
            "/genes/G000/predictions",
            "/genes/G001/predictions",
            "/genes/G000/aggregate",
            "/embedding?primary=G000",
        ]
        golden = {path: client.get(path).content for path in replay}

        # apply deletes exactly the planted noise triples
        resp = client.post(
            "/strategies/apply", json={"ids": [sid], "note": "prune noise endpoint"}
        )
        record = resp.json()
        assert record["total_deleted"] == manifest["noise"]["triple_count"]
        assert record["fraction_deleted"] == pytest.approx(
            manifest["noise"]["triple_fraction"]
        )
        assert record["model_version"] is None
        assert client.get("/session").json()["pending_strategies"] == []
        ops = client.get("/operations").json()
        assert len(ops) == 1 and ops[0]["note"] == "prune noise endpoint"

        # retrain in background; reads stay live
        job_id = client.post("/retrain").json()["job_id"]
        live = client.get("/genes/G000/predictions")
        assert live.status_code == 200
        status = wait_for_job(client, job_id)
        assert status["status"] == "done" and status["model_version"] == 2

        models = client.get("/models").json()
        assert len(models) == 2
        assert [m["active"] for m in models] == [True, False]
        ops = client.get("/operations").json()
        assert ops[0]["model_version"] == 2

        # activate the retrained model: noise BP gone from served paths
        client.post("/models/2/activate")
        models = client.get("/models").json()
        assert [m["active"] for m in models] == [False, True]
        noise_bp = manifest["noise"]["bp_ids"][0]
        paths = client.get("/genes/G000/paths").json()
        for plist in paths.values():
            for p in plist:
                assert noise_bp not in p["nodes"]

        # rollback: v1 responses replay byte-identically
        client.post("/models/1/activate")
        for path, want in golden.items():
            assert client.get(path).content == want, path

        # note is the only mutable field
        client.patch(f"/operations/{ops[0]['id']}/note", json={"note": "edited"})
        ops2 = client.get("/operations").json()
        assert ops2[0]["note"] == "edited"
        assert {k: v for k, v in ops2[0].items() if k != "note"} == {
            k: v for k, v in ops[0].items() if k != "note"
        }
        client.post("/models/2/activate")

    def test_ops_log_is_append_only_jsonl(self, workbench):
        client, service, _ = workbench
        lines = service._ops_path.read_text().strip().splitlines()
        assert len(lines) >= 3  # operation + model completion + note edit
        kinds = [json.loads(line)["type"] for line in lines]
        assert {"operation", "model", "note"} <= set(kinds)

    def test_unknown_strategy_404(self, workbench):
        client, _, _ = workbench
        resp = client.post("/strategies/apply", json={"ids": [999], "note": ""})
        assert resp.status_code == 404

    def test_bad_pattern_400(self, workbench):
        client, service, manifest = workbench
        t = sorted(service.kg.triples())[0]
        resp = client.post(
            "/strategies",
            json={
                "anchor": {"head": t.head, "relation": t.relation, "tail": t.tail},
                "pattern": "X-Y-Z",
            },
        )
        assert resp.status_code == 400

    def test_unknown_anchor_404(self, workbench):
        client, _, _ = workbench
        resp = client.post(
            "/strategies",
            json={"anchor": {"head": "a", "relation": "b", "tail": "c"}, "pattern": "L-L-L"},
        )
        assert resp.status_code == 404

    def test_unknown_model_activate_404(self, workbench):
        client, _, _ = workbench
        assert client.post("/models/99/activate").status_code == 404

    def test_strategy_delete_endpoint(self, workbench):
        client, service, _ = workbench
        t = sorted(service.kg.triples())[0]
        sid = client.post(
            "/strategies",
            json={
                "anchor": {"head": t.head, "relation": t.relation, "tail": t.tail},
                "pattern": "L-L-L",
            },
        ).json()["id"]
        assert client.delete(f"/strategies/{sid}").status_code == 200
        assert sid not in client.get("/session").json()["pending_strategies"]


class TestConcurrencyGuards:
    def test_concurrent_retrain_409(self, small_corpus, tmp_path_factory):
        corpus_dir, _ = small_corpus
        service = WorkbenchService(
            corpus_dir, tmp_path_factory.mktemp("m2"), seed=6, config=TINY_CFG
        )
        client = TestClient(create_app(service))
        job = client.post("/retrain")
        assert job.status_code == 200
        second = client.post("/retrain")
        assert second.status_code == 409
        apply_resp = client.post("/strategies/apply", json={"ids": [], "note": ""})
        assert apply_resp.status_code in (400, 409)
        wait_for_job(client, job.json()["job_id"])
        third = client.post("/retrain")
        assert third.status_code == 200
        wait_for_job(client, third.json()["job_id"])
        assert len(client.get("/models").json()) == 3
