"""Per-gene feature vectors and the 2D embedding behind the Embedding view.

Sequence features are L2-normalized k-mer counts; description features come
from a deterministic signed hashed bag-of-words. The 2D projection is a
seeded attraction/repulsion neighbor embedding over a kNN graph built in
fused feature space; it trades exactness for preserved local structure.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TEXT_DIM = 256
TEXT_HASH_SEED = b"slworkbench-text-v1"
_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")

_BASE_CODES = np.full(256, -1, dtype=np.int64)
for _i, _b in enumerate(b"ACGT"):
    _BASE_CODES[_b] = _i


def kmer_counts(sequence: str, k: int) -> tuple[np.ndarray, int]:
    """Sliding-window k-mer counts over {A,C,G,T}.

    Windows containing a non-ACGT character are skipped; the skip count is
    returned alongside. Sequences shorter than k yield the zero vector.
    Index order is lexicographic with A=0, C=1, G=2, T=3.
    """
    if not 1 <= k <= 8:
        raise ValueError(f"k must be in 1..8, got {k}")
    dim = 4**k
    codes = _BASE_CODES[np.frombuffer(sequence.upper().encode("ascii"), dtype=np.uint8)]
    n = len(codes) - k + 1
    if n <= 0:
        return np.zeros(dim, dtype=np.int64), 0
    windows = np.lib.stride_tricks.sliding_window_view(codes, k)
    valid = (windows >= 0).all(axis=1)
    powers = 4 ** np.arange(k - 1, -1, -1, dtype=np.int64)
    idx = windows[valid] @ powers
    counts = np.bincount(idx, minlength=dim)
    return counts, int(n - valid.sum())


def _unit(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 0 else v


def kmer_vector(sequence: str, k: int = 4) -> np.ndarray:
    counts, _ = kmer_counts(sequence, k)
    return _unit(counts.astype(np.float64))


def text_vector(description: str, dim: int = TEXT_DIM) -> np.ndarray:
    """Signed hashed bag-of-words; deterministic across runs and platforms."""
    v = np.zeros(dim, dtype=np.float64)
    for token in _TOKEN_SPLIT.split(description.lower()):
        if not token:
            continue
        digest = hashlib.blake2b(
            token.encode("utf-8"), digest_size=8, key=TEXT_HASH_SEED
        ).digest()
        h = int.from_bytes(digest, "little")
        sign = 1.0 if (h >> 32) & 1 else -1.0
        v[h % dim] += sign
    return _unit(v)


@dataclass
class GeneFeature:
    gene_id: str
    kmer_vector: np.ndarray
    text_vector: np.ndarray

    @property
    def fused(self) -> np.ndarray:
        return np.concatenate([self.kmer_vector, self.text_vector])


def build_features(
    sequences: dict[str, str], descriptions: dict[str, str], k: int = 4
) -> list[GeneFeature]:
    feats = []
    for gid in sorted(set(sequences) | set(descriptions)):
        feats.append(
            GeneFeature(
                gene_id=gid,
                kmer_vector=kmer_vector(sequences.get(gid, ""), k),
                text_vector=text_vector(descriptions.get(gid, "")),
            )
        )
    return feats


# -- 2D projection ---------------------------------------------------------


@dataclass
class EmbeddingPoint:
    gene_id: str
    x: float
    y: float
    neighbors_k: list[str]


def _pca(X: np.ndarray, dim: int) -> np.ndarray:
    Xc = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(Xc, full_matrices=False)
    # fix component signs so results are stable across equivalent runs
    for row in vt:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    return Xc @ vt[: min(dim, vt.shape[0])].T


def pca_2d(X: np.ndarray) -> np.ndarray:
    """Plain 2-component PCA, the projection's quality baseline."""
    return _pca(X, 2)


def knn_indices(X: np.ndarray, k: int) -> np.ndarray:
    """Exact k nearest neighbors per row, ties broken by index."""
    d2 = np.sum(X**2, axis=1)[:, None] + np.sum(X**2, axis=1)[None, :] - 2 * X @ X.T
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, : min(k, X.shape[0] - 1)]


def project_2d(
    gene_ids: list[str],
    fused: np.ndarray,
    seed: int,
    n_neighbors: int = 15,
    pca_dim: int = 10,
    iterations: int = 200,
) -> list[EmbeddingPoint]:
    """Seeded neighbor embedding: PCA init, kNN attraction, sampled repulsion.

    Deterministic for a fixed (corpus, seed); preserves local neighborhoods
    rather than global distances.
    """
    n = len(gene_ids)
    if n < 2:
        raise ValueError("projection needs at least 2 genes")
    if fused.shape[0] != n:
        raise ValueError("gene_ids and feature rows disagree")
    rng = np.random.default_rng(seed)
    P = _pca(fused.astype(np.float64), pca_dim)
    nn = knn_indices(P, n_neighbors)

    Y = P[:, :2].copy()
    scale = float(np.abs(Y).max())
    if scale > 0:
        Y /= scale
    Y += rng.normal(scale=1e-4, size=Y.shape)

    edges_i = np.repeat(np.arange(n), nn.shape[1])
    edges_j = nn.ravel()
    n_rep = 5 * len(edges_i)
    for it in range(iterations):
        lr = 0.08 * (1.0 - it / iterations)
        grad = np.zeros_like(Y)
        diff = Y[edges_i] - Y[edges_j]
        np.add.at(grad, edges_i, diff)
        np.add.at(grad, edges_j, -diff)
        ri = rng.integers(0, n, n_rep)
        rj = rng.integers(0, n, n_rep)
        rdiff = Y[ri] - Y[rj]
        push = rdiff / (0.05 + np.sum(rdiff**2, axis=1))[:, None]
        np.clip(push, -4.0, 4.0, out=push)
        np.add.at(grad, ri, -0.4 * push)
        np.add.at(grad, rj, 0.4 * push)
        Y -= lr * grad / max(1.0, nn.shape[1])
    return [
        EmbeddingPoint(
            gene_id=gene_ids[i],
            x=float(Y[i, 0]),
            y=float(Y[i, 1]),
            neighbors_k=[gene_ids[j] for j in nn[i]],
        )
        for i in range(n)
    ]


def neighborhood_preservation(fused: np.ndarray, coords: np.ndarray, k: int = 10) -> float:
    """Mean Jaccard overlap between k-NN sets in feature space and in 2D."""
    a = knn_indices(fused, k)
    b = knn_indices(coords, k)
    scores = []
    for i in range(fused.shape[0]):
        sa, sb = set(a[i].tolist()), set(b[i].tolist())
        scores.append(len(sa & sb) / len(sa | sb))
    return float(np.mean(scores))


# -- file formats ------------------------------------------------------------


def load_fasta(path: str | Path) -> dict[str, str]:
    sequences: dict[str, str] = {}
    current: str | None = None
    chunks: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith(">"):
                if current is not None:
                    sequences[current] = "".join(chunks)
                current = line[1:].split()[0]
                chunks = []
            else:
                chunks.append(line)
    if current is not None:
        sequences[current] = "".join(chunks)
    return sequences


def load_genes_tsv(path: str | Path) -> dict[str, tuple[str, str]]:
    """genes.tsv rows as gene_id -> (symbol, description)."""
    out: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"genes.tsv: expected 3 fields, got {len(fields)}")
            out[fields[0]] = (fields[1], fields[2])
    return out
