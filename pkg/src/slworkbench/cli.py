"""The `workbench` command line: serve, train, prune, datagen."""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from .datagen import CorpusSpec, generate
from .kg import ingest, triples_tsv, write_snapshot
from .metapath import apply_strategies, strategy_from_json
from .model import ModelConfig, SplitConfig, save_model, train


def _resolve_seed(seed: int) -> int:
    env = os.environ.get("WORKBENCH_SEED")
    return int(env) if env else seed


def _load_config(config_file: str | None, seed: int) -> ModelConfig:
    if not config_file:
        return ModelConfig(seed=seed)
    payload = json.loads(Path(config_file).read_text(encoding="utf-8"))
    payload.setdefault("seed", seed)
    return ModelConfig(**payload)


@click.group()
def main():
    """Synthetic-lethality workbench."""


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--models", required=True, type=click.Path(file_okay=False))
@click.option("--port", default=8080, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--config", "config_file", default=None, type=click.Path(exists=True))
def serve(data, models, port, host, seed, config_file):
    """Start the HTTP service (trains an initial model if none exists)."""
    import uvicorn

    from .service import WorkbenchService, create_app

    seed = _resolve_seed(seed)
    service = WorkbenchService(
        data, models, seed=seed, config=_load_config(config_file, seed)
    )
    click.echo(
        f"kg: {service.ingest_report.entity_count} entities / "
        f"{service.ingest_report.triple_count} triples; model v{service.active_version}"
    )
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


@main.command("train")
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=42, show_default=True)
@click.option("--config", "config_file", default=None, type=click.Path(exists=True))
def train_cmd(data, out, seed, config_file):
    """Train one model on the data directory and write it to OUT."""
    seed = _resolve_seed(seed)
    data = Path(data)
    kg, report, _ = ingest(data / "entities.tsv", data / "triples.tsv")
    click.echo(f"ingested {report.triple_count} triples")
    cfg = _load_config(config_file, seed)
    model = train(kg, SplitConfig(seed=seed), cfg)
    save_model(model, out)
    click.echo(f"epochs: {len(model.loss_curve)}  metrics: {model.metrics}")


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--strategy", "strategy_file", required=True, type=click.Path(exists=True))
def prune(data, strategy_file):
    """Apply a strategy file to the data directory's triples (in place).

    A snapshot of the pre-deletion triple set is written under
    DATA/snapshots/ first.
    """
    data = Path(data)
    kg, _, _ = ingest(data / "entities.tsv", data / "triples.tsv")
    payload = json.loads(Path(strategy_file).read_text(encoding="utf-8"))
    specs = payload if isinstance(payload, list) else [payload]
    strategies = [strategy_from_json(kg, s) for s in specs]
    write_snapshot(kg, data / "snapshots")
    report = apply_strategies(strategies, kg)
    (data / "triples.tsv").write_text(triples_tsv(kg.triples()), encoding="utf-8")
    click.echo(
        f"deleted {report.total_deleted} of {report.total_before} triples "
        f"({report.fraction_deleted:.4%})"
    )


@main.command()
@click.option("--spec", "spec_file", default=None, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=None, type=int)
def datagen(spec_file, out, seed):
    """Generate a seeded synthetic corpus with planted SL structure."""
    spec = (
        CorpusSpec.from_json(json.loads(Path(spec_file).read_text(encoding="utf-8")))
        if spec_file
        else CorpusSpec()
    )
    if seed is not None:
        spec.seed = seed
    spec.seed = _resolve_seed(spec.seed)
    manifest = generate(spec, out)
    click.echo(
        f"wrote {manifest['counts']['triples']} triples, "
        f"{manifest['counts']['sl_pairs']} SL pairs to {out}"
    )


if __name__ == "__main__":
    main()
