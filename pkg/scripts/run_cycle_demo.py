"""End-to-end demo of one prune -> retrain -> compare cycle, in process.

Generates a seeded corpus, trains a baseline, prunes the planted noise
endpoint with an H-H-L strategy, retrains, and prints both models' metrics.

    python scripts/run_cycle_demo.py [--small]
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from slworkbench.datagen import CorpusSpec, generate
from slworkbench.kg import Triple, ingest
from slworkbench.metapath import apply_strategies, lattice_report, strategy_from_anchor
from slworkbench.model import ModelConfig, SplitConfig, train

SMALL = CorpusSpec(
    genes=120, bps=60, pathways=12, mfs=8, ccs=10,
    cluster_size=24, cluster_bp_pool=8, bps_per_gene=5, seed=42, seq_len=150,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--small", action="store_true", help="quick run on a smaller corpus")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    spec = SMALL if args.small else CorpusSpec()
    spec.seed = args.seed
    with tempfile.TemporaryDirectory() as tmp:
        manifest = generate(spec, tmp)
        kg, report, _ = ingest(
            Path(tmp) / "entities.tsv", Path(tmp) / "triples.tsv", Path(tmp) / "diseases.tsv"
        )
        print(f"corpus: {report.entity_count} entities, {report.triple_count} triples, "
              f"{manifest['counts']['sl_pairs']} SL pairs")

        cfg = ModelConfig(seed=args.seed, epochs=20 if args.small else 50)
        base = train(kg, SplitConfig(seed=args.seed), cfg)
        print(f"baseline     epochs={len(base.loss_curve):3d} metrics={_fmt(base.metrics)}")

        noise_bp = manifest["noise"]["bp_ids"][0]
        anchor = next(Triple(*t) for t in manifest["noise"]["triples"] if t[2] == noise_bp)
        strategy = strategy_from_anchor(kg, anchor, "H-H-L")
        counts = lattice_report(strategy, kg).counts
        deleted = apply_strategies([strategy], kg)
        print(f"pruned {deleted.total_deleted} triples "
              f"({deleted.fraction_deleted:.3%}); lattice H-H-L count {counts['H-H-L']}")

        retrained = train(kg, SplitConfig(seed=args.seed), cfg)
        print(f"after prune  epochs={len(retrained.loss_curve):3d} metrics={_fmt(retrained.metrics)}")


def _fmt(metrics):
    return " ".join(f"{k}={v:.3f}" for k, v in sorted(metrics.items()))


if __name__ == "__main__":
    main()
