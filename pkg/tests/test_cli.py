import json

from click.testing import CliRunner

from slworkbench.cli import main


def test_datagen_train_prune_pipeline(tmp_path):
    runner = CliRunner()
    spec = {
        "genes": 40,
        "bps": 20,
        "pathways": 6,
        "mfs": 4,
        "ccs": 4,
        "cluster_size": 10,
        "cluster_bp_pool": 5,
        "bps_per_gene": 4,
        "seed": 11,
        "seq_len": 80,
    }
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(spec))
    data = tmp_path / "data"

    result = runner.invoke(main, ["datagen", "--spec", str(spec_file), "--out", str(data)])
    assert result.exit_code == 0, result.output
    assert (data / "manifest.json").exists()

    cfg = tmp_path / "model.json"
    cfg.write_text(json.dumps({"embed_dim": 8, "epochs": 2, "top_k": 10}))
    result = runner.invoke(
        main,
        ["train", "--data", str(data), "--out", str(tmp_path / "model"), "--config", str(cfg)],
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "model" / "embeddings.bin").exists()

    manifest = json.loads((data / "manifest.json").read_text())
    noise_bp = manifest["noise"]["bp_ids"][0]
    fwd = next(t for t in manifest["noise"]["triples"] if t[2] == noise_bp)
    strategy = tmp_path / "strategy.json"
    strategy.write_text(
        json.dumps(
            {
                "anchor": {"head": fwd[0], "relation": fwd[1], "tail": fwd[2]},
                "pattern": "H-H-L",
            }
        )
    )
    before = (data / "triples.tsv").read_text().count("\n")
    result = runner.invoke(main, ["prune", "--data", str(data), "--strategy", str(strategy)])
    assert result.exit_code == 0, result.output
    after = (data / "triples.tsv").read_text().count("\n")
    assert before - after == manifest["noise"]["triple_count"]
    # a snapshot of the pre-deletion state was recorded
    assert any((data / "snapshots").iterdir())


def test_env_seed_overrides_flag(tmp_path, monkeypatch):
    runner = CliRunner()
    monkeypatch.setenv("WORKBENCH_SEED", "99")
    out = tmp_path / "c"
    result = runner.invoke(
        main,
        ["datagen", "--out", str(out), "--seed", "13"],
        env={"WORKBENCH_SEED": "99"},
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 99
