"""Timing breakdown for propagation, backprop and a full epoch.

    python scripts/profile_training.py [--genes 500]
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from slworkbench.datagen import CorpusSpec, generate
from slworkbench.kg import ingest
from slworkbench.model import (
    ModelConfig,
    SplitConfig,
    compile_graph,
    propagate,
    sampled_softmax_loss,
    split_sl_triples,
    train,
    training_graph,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--genes", type=int, default=500)
    ap.add_argument("--epochs", type=int, default=3)
    args = ap.parse_args()

    spec = CorpusSpec(genes=args.genes)
    with tempfile.TemporaryDirectory() as tmp:
        generate(spec, tmp)
        kg, report, _ = ingest(Path(tmp) / "entities.tsv", Path(tmp) / "triples.tsv")
        print(f"{report.triple_count} triples, {report.entity_count} entities")

        split = split_sl_triples(kg, SplitConfig(seed=42))
        cg = compile_graph(training_graph(kg, split))
        rng = np.random.default_rng(0)
        ent = rng.normal(0, 0.125, (cg.n_entities, 64))
        rel = rng.normal(0, 0.125, (cg.n_relations, 64))
        genes = cg.genes()

        t0 = time.perf_counter()
        reps = 50
        for i in range(reps):
            propagate(cg, ent, rel, int(genes[i % len(genes)]))
        print(f"propagate: {(time.perf_counter() - t0) / reps * 1e3:.2f} ms")

        t0 = time.perf_counter()
        for i in range(reps):
            g = int(genes[i % len(genes)])
            targets = [int(genes[(i + j + 1) % len(genes)]) for j in range(3)]
            sampled_softmax_loss(cg, ent, rel, g, [(targets[0], targets[1:])])
        print(f"loss+grads: {(time.perf_counter() - t0) / reps * 1e3:.2f} ms")

        t0 = time.perf_counter()
        model = train(kg, SplitConfig(seed=42), ModelConfig(seed=42, epochs=args.epochs))
        dt = time.perf_counter() - t0
        print(f"{len(model.loss_curve)} epochs in {dt:.1f} s "
              f"({dt / max(1, len(model.loss_curve)):.1f} s/epoch)")


if __name__ == "__main__":
    main()
