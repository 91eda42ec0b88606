"""Seeded desk-scale corpus generator with planted SL structure and noise.

Genes come in clusters wired densely to a per-cluster pool of biological
processes, so within-cluster pairs share BP neighbors and become SL
candidates under the sharing rule. A designated noise BP family is linked
to a random slice of genes independently of cluster structure, giving a
high-degree, SL-irrelevant endpoint that a metapath strategy can prune.
The emitted manifest records every planted SL pair and noise triple and is
the ground-truth oracle for the acceptance suite.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

SL_RELATION = "SL_GsG"
RELATIONS = {
    "bp": ("involved_in", "involved_in_inv"),
    "pathway": ("PARTICIPATES_GpPW", "PARTICIPATES_GpPW_inv"),
    "mf": ("enables", "enables_inv"),
    "cc": ("part_of", "part_of_inv"),
}


@dataclass
class CorpusSpec:
    genes: int = 500
    bps: int = 200
    pathways: int = 50
    mfs: int = 40
    ccs: int = 60
    share_threshold: int = 2  # s: shared BP neighbors needed for SL eligibility
    p_sl: float = 0.8
    f_noise: float = 0.1
    seed: int = 42
    # corpus shape knobs
    cluster_size: int = 40
    cluster_bp_pool: int = 10
    bps_per_gene: int = 6
    background_bp_links: int = 2
    noise_family: int = 1
    clustered_fraction: float = 0.8
    seq_len: int = 300

    @classmethod
    def from_json(cls, payload: dict) -> "CorpusSpec":
        return cls(**payload)


def sl_coin(seed: int, g1: str, g2: str, p_sl: float) -> bool:
    """Deterministic per-pair SL decision, reproducible by an outside script."""
    a, b = sorted((g1, g2))
    digest = hashlib.blake2b(
        f"{seed}:{a}:{b}".encode("utf-8"), digest_size=8
    ).digest()
    u = int.from_bytes(digest, "little") / 2**64
    return u < p_sl


def eligible_pairs(
    bp_neighbors: dict[str, set[str]], threshold: int
) -> list[tuple[str, str]]:
    """Gene pairs sharing at least `threshold` BP neighbors."""
    genes = sorted(bp_neighbors)
    by_bp: dict[str, list[str]] = {}
    for g in genes:
        for b in bp_neighbors[g]:
            by_bp.setdefault(b, []).append(g)
    shared: dict[tuple[str, str], int] = {}
    for members in by_bp.values():
        members = sorted(members)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                key = (members[i], members[j])
                shared[key] = shared.get(key, 0) + 1
    return sorted(k for k, n in shared.items() if n >= threshold)


def _markov_sequence(rng: np.random.Generator, transition: np.ndarray, length: int) -> str:
    bases = "ACGT"
    state = int(rng.integers(0, 4))
    out = [bases[state]]
    for _ in range(length - 1):
        state = int(rng.choice(4, p=transition[state]))
        out.append(bases[state])
    return "".join(out)


def generate(spec: CorpusSpec, out_dir: str | Path) -> dict:
    """Write the corpus TSV/FASTA files plus manifest.json; returns the manifest."""
    if spec.genes < 20:
        raise ValueError("need at least 20 genes")
    n_clustered = int(spec.clustered_fraction * spec.genes)
    n_clusters = n_clustered // spec.cluster_size
    if n_clusters < 1:
        raise ValueError("cluster_size larger than the clustered gene population")
    bp_needed = n_clusters * spec.cluster_bp_pool + spec.noise_family
    if bp_needed > spec.bps:
        raise ValueError(
            f"spec needs {bp_needed} BPs for clusters+noise but only {spec.bps} exist"
        )
    rng = np.random.default_rng(spec.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    gene_ids = [f"G{i:03d}" for i in range(spec.genes)]
    bp_ids = [f"B{i:03d}" for i in range(spec.bps)]
    pw_ids = [f"P{i:02d}" for i in range(spec.pathways)]
    mf_ids = [f"M{i:02d}" for i in range(spec.mfs)]
    cc_ids = [f"C{i:02d}" for i in range(spec.ccs)]

    cluster_of = {
        g: (i // spec.cluster_size if i < n_clusters * spec.cluster_size else -1)
        for i, g in enumerate(gene_ids)
    }
    cluster_bps = {
        c: bp_ids[c * spec.cluster_bp_pool : (c + 1) * spec.cluster_bp_pool]
        for c in range(n_clusters)
    }
    noise_bps = bp_ids[n_clusters * spec.cluster_bp_pool :][: spec.noise_family]
    background_bps = bp_ids[n_clusters * spec.cluster_bp_pool + spec.noise_family :]

    triples: list[tuple[str, str, str]] = []

    def link(head: str, kind: str, tail: str):
        fwd, inv = RELATIONS[kind]
        triples.append((head, fwd, tail))
        triples.append((tail, inv, head))

    bp_neighbors: dict[str, set[str]] = {g: set() for g in gene_ids}
    for g in gene_ids:
        c = cluster_of[g]
        if c >= 0:
            picks = rng.choice(
                spec.cluster_bp_pool, size=spec.bps_per_gene, replace=False
            )
            chosen = [cluster_bps[c][i] for i in sorted(picks)]
        elif background_bps:
            picks = rng.choice(
                len(background_bps),
                size=min(spec.background_bp_links, len(background_bps)),
                replace=False,
            )
            chosen = [background_bps[i] for i in sorted(picks)]
        else:
            chosen = []
        for b in chosen:
            link(g, "bp", b)
            bp_neighbors[g].add(b)

    # noise family: a random f_noise slice of genes, independent of clusters
    n_noise_genes = round(spec.f_noise * spec.genes)
    noise_gene_idx = sorted(rng.choice(spec.genes, size=n_noise_genes, replace=False))
    noise_triples: list[tuple[str, str, str]] = []
    for i in noise_gene_idx:
        g = gene_ids[i]
        b = noise_bps[int(rng.integers(0, len(noise_bps)))] if noise_bps else None
        if b is None:
            continue
        fwd, inv = RELATIONS["bp"]
        noise_triples.append((g, fwd, b))
        noise_triples.append((b, inv, g))
        bp_neighbors[g].add(b)
    triples.extend(noise_triples)

    # decorations: pathway drawn from a per-cluster pool, MF/CC uniform
    pw_per_cluster = max(1, spec.pathways // max(1, n_clusters + 1))
    for g in gene_ids:
        c = cluster_of[g]
        lo = (c if c >= 0 else n_clusters) * pw_per_cluster % spec.pathways
        pool = [pw_ids[(lo + j) % spec.pathways] for j in range(pw_per_cluster)]
        link(g, "pathway", pool[int(rng.integers(0, len(pool)))])
        link(g, "mf", mf_ids[int(rng.integers(0, spec.mfs))])
        link(g, "cc", cc_ids[int(rng.integers(0, spec.ccs))])

    # SL rule over the final BP adjacency (noise links included)
    eligible = eligible_pairs(bp_neighbors, spec.share_threshold)
    sl_pairs = [
        (a, b) for a, b in eligible if sl_coin(spec.seed, a, b, spec.p_sl)
    ]
    for a, b in sl_pairs:
        triples.append((a, SL_RELATION, b))

    seen = set()
    for t in triples:
        if t in seen:
            raise RuntimeError(f"generator produced duplicate triple {t}")
        seen.add(t)
    triples.sort()

    # entity + gene tables
    entities: list[tuple[str, str, str]] = []
    descriptions: dict[str, str] = {}
    vocab_size = 24
    for g in gene_ids:
        c = cluster_of[g]
        tag = f"c{c}" if c >= 0 else "bg"
        words = [
            f"{tag}kw{int(rng.integers(0, vocab_size))}" for _ in range(8)
        ]
        descriptions[g] = f"synthetic gene of module {tag} " + " ".join(words)
        entities.append((g, "Gene", g))
    for b in bp_ids:
        name = (
            f"ubiquitous_process_{noise_bps.index(b)}"
            if b in noise_bps
            else f"biological_process_{b[1:]}"
        )
        entities.append((b, "BP", name))
    for p in pw_ids:
        entities.append((p, "Pathway", f"pathway_{p[1:]}"))
    for m in mf_ids:
        entities.append((m, "MF", f"molecular_function_{m[1:]}"))
    for cc in cc_ids:
        entities.append((cc, "CC", f"cellular_component_{cc[1:]}"))

    # sequences: per-cluster Markov chains give cluster-correlated k-mer bias
    transitions = {}
    for c in range(-1, n_clusters):
        raw = rng.dirichlet(np.full(4, 0.35), size=4)
        transitions[c] = raw / raw.sum(axis=1, keepdims=True)
    sequences = {
        g: _markov_sequence(rng, transitions[cluster_of[g]], spec.seq_len)
        for g in gene_ids
    }

    disease_rows = []
    for c in range(n_clusters):
        members = [g for g in gene_ids if cluster_of[g] == c][:12]
        for g in members:
            disease_rows.append((f"D{c:02d}", f"synthetic_disease_{c}", g))

    _write_tsv(out / "entities.tsv", entities)
    _write_tsv(out / "triples.tsv", triples)
    _write_tsv(out / "diseases.tsv", disease_rows)
    _write_tsv(
        out / "genes.tsv", [(g, g, descriptions[g]) for g in gene_ids]
    )
    with open(out / "sequences.fasta", "w", encoding="utf-8") as fh:
        for g in gene_ids:
            fh.write(f">{g}\n{sequences[g]}\n")

    relation_ids = sorted({r for _, r, _ in triples})
    manifest = {
        "seed": spec.seed,
        "spec": asdict(spec),
        "counts": {
            "entities": len(entities),
            "relations": len(relation_ids),
            "triples": len(triples),
            "genes": spec.genes,
            "sl_pairs": len(sl_pairs),
            "eligible_pairs": len(eligible),
            "diseases": n_clusters,
        },
        "clusters": {g: cluster_of[g] for g in gene_ids},
        "sl_pairs": [list(p) for p in sl_pairs],
        "noise": {
            "bp_ids": noise_bps,
            "triples": [list(t) for t in sorted(noise_triples)],
            "triple_count": len(noise_triples),
            "gene_fraction": n_noise_genes / spec.genes,
            "triple_fraction": len(noise_triples) / len(triples),
        },
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def _write_tsv(path: Path, rows: list[tuple[str, ...]]):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write("\t".join(row) + "\n")


def gaussian_clusters(
    n_per_cluster: int, dim: int, n_clusters: int, separation: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Labeled Gaussian blobs; the projection-quality test fixture."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, separation, (n_clusters, dim))
    X = np.vstack(
        [centers[c] + rng.normal(0.0, 1.0, (n_per_cluster, dim)) for c in range(n_clusters)]
    )
    labels = np.repeat(np.arange(n_clusters), n_per_cluster)
    return X, labels
