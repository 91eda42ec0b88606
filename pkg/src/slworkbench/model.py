"""Attentive 3-hop path-scoring model over the knowledge graph.

The encoder propagates additive messages (source state + relation vector)
from a primary gene outward for three hops; incoming messages per node are
combined with softmax attention over scaled dot-product logits. Gene nodes
reached by the propagation are scored against the primary's embedding and
ranked; interpretive paths carry the product of their hops' attention
coefficients. Gradients are derived by hand and checked against finite
differences in the test suite.
"""

from __future__ import annotations

import json
import math
import struct
import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from pathlib import Path

import numpy as np

from .kg import EntityType, KnowledgeGraph, Triple

SL_RELATION = "SL_GsG"


@dataclass
class ModelConfig:
    embed_dim: int = 64
    hops: int = 3
    negatives_per_positive: int = 32
    learning_rate: float = 1e-3
    epochs: int = 50
    top_k: int = 50
    seed: int = 0
    patience: int = 5
    max_paths_per_partner: int = 100

    def to_json(self) -> dict:
        return {
            "embed_dim": self.embed_dim,
            "hops": self.hops,
            "negatives_per_positive": self.negatives_per_positive,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "top_k": self.top_k,
            "seed": self.seed,
            "patience": self.patience,
            "max_paths_per_partner": self.max_paths_per_partner,
        }


@dataclass
class SplitConfig:
    train_frac: float = 0.8
    valid_frac: float = 0.1
    test_frac: float = 0.1
    seed: int = 0

    def __post_init__(self):
        total = self.train_frac + self.valid_frac + self.test_frac
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"split fractions sum to {total}, expected 1")


# -- compiled graph ----------------------------------------------------------


class CompiledGraph:
    """Integer-coded arc lists, CSR-grouped by source.

    Stored triples become forward arcs; triples whose relation is in the
    graph's symmetric set (SL edges) also get a reversed arc with the same
    triple identity, so symmetric edges are traversable from both ends.
    """

    def __init__(self, kg: KnowledgeGraph):
        self.kg_version = kg.version
        self.entity_ids = sorted(kg.entities)
        self.eindex = {e: i for i, e in enumerate(self.entity_ids)}
        self.relation_ids = sorted(kg.relations)
        self.rindex = {r: i for i, r in enumerate(self.relation_ids)}
        types = sorted(t.value for t in EntityType)
        self.type_ids = types
        tindex = {t: i for i, t in enumerate(types)}
        self.etype = np.array(
            [tindex[kg.entities[e].etype.value] for e in self.entity_ids], dtype=np.int64
        )
        self.gene_type = tindex[EntityType.GENE.value]

        src, rel, dst, rev = [], [], [], []
        for t in sorted(kg.triples()):
            h, r, tl = self.eindex[t.head], self.rindex[t.relation], self.eindex[t.tail]
            src.append(h)
            rel.append(r)
            dst.append(tl)
            rev.append(False)
            if t.relation in kg.symmetric_relations and t.head != t.tail:
                src.append(tl)
                rel.append(r)
                dst.append(h)
                rev.append(True)
        order = np.lexsort(
            (
                np.asarray(rev, dtype=np.int64),
                np.asarray(dst, dtype=np.int64),
                np.asarray(rel, dtype=np.int64),
                np.asarray(src, dtype=np.int64),
            )
        ) if src else np.array([], dtype=np.int64)
        self.arc_src = np.asarray(src, dtype=np.int64)[order]
        self.arc_rel = np.asarray(rel, dtype=np.int64)[order]
        self.arc_dst = np.asarray(dst, dtype=np.int64)[order]
        self.arc_rev = np.asarray(rev, dtype=bool)[order]
        counts = np.bincount(self.arc_src, minlength=len(self.entity_ids))
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    @property
    def n_entities(self) -> int:
        return len(self.entity_ids)

    @property
    def n_relations(self) -> int:
        return len(self.relation_ids)

    def genes(self) -> np.ndarray:
        return np.flatnonzero(self.etype == self.gene_type)

    def arcs_from(self, nodes: np.ndarray) -> np.ndarray:
        """Indices of all arcs whose source is in `nodes` (CSR gather)."""
        starts = self.indptr[nodes]
        counts = self.indptr[nodes + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.array([], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
        base = np.repeat(starts - offsets, counts)
        return base + np.arange(total, dtype=np.int64)


def compile_graph(kg: KnowledgeGraph) -> CompiledGraph:
    return CompiledGraph(kg)


# -- propagation -------------------------------------------------------------


@dataclass
class LayerTrace:
    src_rows: np.ndarray  # row into previous layer's state matrix, per arc
    rel: np.ndarray
    dst: np.ndarray  # entity index per arc, sorted
    group: np.ndarray  # per-arc index into this layer's node array
    starts: np.ndarray  # reduceat boundaries per destination group
    alpha: np.ndarray
    messages: np.ndarray  # (n_arcs, d)
    reversed_arc: np.ndarray


@dataclass
class Propagation:
    primary: int
    nodes: list[np.ndarray]  # per layer 0..hops: entity indices with a state
    states: list[np.ndarray]  # per layer: (len(nodes), d) hidden states
    traces: list[LayerTrace]  # per layer 1..hops
    last_state: dict[int, tuple[int, int]]  # entity -> (layer, row) last reached

    def state_of(self, entity: int) -> np.ndarray:
        layer, row = self.last_state[entity]
        return self.states[layer][row]


def propagate(
    cg: CompiledGraph, ent: np.ndarray, rel: np.ndarray, primary: int, hops: int = 3
) -> Propagation:
    """Run attentive message passing outward from the primary gene.

    Frontier t is every node with an incoming arc from frontier t-1; a node
    reached at several layers keeps one state per layer, and downstream
    consumers use the last one. Attention per (node, layer) sums to one.
    """
    d = ent.shape[1]
    scale = 1.0 / math.sqrt(d)
    nodes = [np.array([primary], dtype=np.int64)]
    states = [ent[[primary]].copy()]
    traces: list[LayerTrace] = []
    last_state = {}
    for t in range(1, hops + 1):
        prev_nodes = nodes[-1]
        arc_ix = cg.arcs_from(prev_nodes)
        if len(arc_ix) == 0:
            break
        # prev_nodes is sorted (np.unique output), so rows come from bisection
        src_rows = np.searchsorted(prev_nodes, cg.arc_src[arc_ix])
        dst = cg.arc_dst[arc_ix]
        order = np.argsort(dst, kind="stable")
        arc_ix = arc_ix[order]
        src_rows = src_rows[order]
        dst = dst[order]
        rel_ix = cg.arc_rel[arc_ix]
        rev = cg.arc_rev[arc_ix]

        new_nodes, group = np.unique(dst, return_inverse=True)
        starts = np.searchsorted(dst, new_nodes)
        messages = states[-1][src_rows] + rel[rel_ix]
        z = np.einsum("ad,ad->a", messages, ent[dst]) * scale
        zmax = np.maximum.reduceat(z, starts)
        ez = np.exp(z - zmax[group])
        denom = np.add.reduceat(ez, starts)
        alpha = ez / denom[group]
        H = np.add.reduceat(alpha[:, None] * messages, starts, axis=0)

        nodes.append(new_nodes)
        states.append(H)
        traces.append(
            LayerTrace(src_rows, rel_ix, dst, group, starts, alpha, messages, rev)
        )
        for row, n in enumerate(new_nodes):
            last_state[int(n)] = (len(nodes) - 1, row)
    return Propagation(primary, nodes, states, traces, last_state)


def backpropagate(
    cg: CompiledGraph,
    ent: np.ndarray,
    rel: np.ndarray,
    prop: Propagation,
    state_grads: list[np.ndarray],
    d_ent: np.ndarray,
    d_rel: np.ndarray,
):
    """Push gradients w.r.t. per-layer states back onto the embeddings.

    `state_grads` mirrors `prop.states`; accumulates into d_ent / d_rel.
    """
    scale = 1.0 / math.sqrt(ent.shape[1])
    for t in range(len(prop.traces), 0, -1):
        tr = prop.traces[t - 1]
        G = state_grads[t][tr.group]
        d_alpha = np.einsum("ad,ad->a", G, tr.messages)
        dM = tr.alpha[:, None] * G
        s = np.add.reduceat(tr.alpha * d_alpha, tr.starts)
        dz = tr.alpha * (d_alpha - s[tr.group])
        dM += dz[:, None] * ent[tr.dst] * scale
        # destination embeddings appear in the logits; arcs are dst-grouped
        d_ent_dst = np.add.reduceat(dz[:, None] * tr.messages, tr.starts, axis=0) * scale
        d_ent[prop.nodes[t]] += d_ent_dst
        rorder = np.argsort(tr.rel, kind="stable")
        rsorted = tr.rel[rorder]
        runiq, rfirst = np.unique(rsorted, return_index=True)
        d_rel[runiq] += np.add.reduceat(dM[rorder], rfirst, axis=0)
        order = np.argsort(tr.src_rows, kind="stable")
        srows = tr.src_rows[order]
        uniq, first = np.unique(srows, return_index=True)
        state_grads[t - 1][uniq] += np.add.reduceat(dM[order], first, axis=0)
    d_ent[prop.primary] += state_grads[0][0]


# -- scoring and ranking ------------------------------------------------------


@dataclass
class Prediction:
    primary: str
    partner: str
    score: float
    rank: int
    correct: bool


def reached_genes(cg: CompiledGraph, prop: Propagation) -> list[int]:
    out = [
        n
        for n in prop.last_state
        if cg.etype[n] == cg.gene_type and n != prop.primary
    ]
    return sorted(out)


def score_entities(
    prop: Propagation, ent: np.ndarray, targets: list[int]
) -> np.ndarray:
    """Dot-product decoder scores at each target's last reached state."""
    eg = ent[prop.primary]
    rows = np.array(
        [prop.states[prop.last_state[c][0]][prop.last_state[c][1]] for c in targets]
    )
    if len(targets) == 0:
        return np.zeros(0)
    return rows @ eg


def rank_candidates(
    cg: CompiledGraph,
    prop: Propagation,
    ent: np.ndarray,
    k: int,
    exclude: set[int] = frozenset(),
) -> list[tuple[int, float]]:
    """Top-k reached genes by decoder score, ties broken by gene id."""
    cands = [c for c in reached_genes(cg, prop) if c not in exclude]
    if not cands:
        return []
    scores = score_entities(prop, ent, cands)
    order = sorted(range(len(cands)), key=lambda i: (-scores[i], cg.entity_ids[cands[i]]))
    return [(cands[i], float(scores[i])) for i in order[:k]]


def predictions_for(
    cg: CompiledGraph,
    ent: np.ndarray,
    rel: np.ndarray,
    primary: int,
    k: int,
    truth: set[str],
    exclude: set[int] = frozenset(),
    hops: int = 3,
) -> list[Prediction]:
    prop = propagate(cg, ent, rel, primary, hops)
    ranked = rank_candidates(cg, prop, ent, k, exclude)
    out = []
    for rank, (c, score) in enumerate(ranked, start=1):
        gid = cg.entity_ids[c]
        out.append(
            Prediction(
                primary=cg.entity_ids[primary],
                partner=gid,
                score=score,
                rank=rank,
                correct=gid in truth,
            )
        )
    return out


# -- ranking metrics ----------------------------------------------------------


def precision_at_k(ranked: list[str], truth: set[str], k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(1 for g in ranked[:k] if g in truth)
    return hits / k


def recall_at_k(ranked: list[str], truth: set[str], k: int) -> float:
    if not truth:
        return 0.0
    hits = sum(1 for g in ranked[:k] if g in truth)
    return hits / len(truth)


def ndcg_at_k(ranked: list[str], truth: set[str], k: int) -> float:
    dcg = sum(
        1.0 / math.log2(i + 1)
        for i, g in enumerate(ranked[:k], start=1)
        if g in truth
    )
    ideal = sum(1.0 / math.log2(i + 1) for i in range(1, min(k, len(truth)) + 1))
    return dcg / ideal if ideal > 0 else 0.0


def ranking_metrics(ranked: list[str], truth: set[str], k: int) -> dict[str, float]:
    return {
        f"precision@{k}": precision_at_k(ranked, truth, k),
        f"recall@{k}": recall_at_k(ranked, truth, k),
        f"ndcg@{k}": ndcg_at_k(ranked, truth, k),
    }


# -- SL splits ----------------------------------------------------------------


@dataclass
class SplitResult:
    config: SplitConfig
    train: list[Triple]
    valid: list[Triple]
    test: list[Triple]
    train_partners: dict[str, set[str]] = field(default_factory=dict)
    valid_partners: dict[str, set[str]] = field(default_factory=dict)
    test_partners: dict[str, set[str]] = field(default_factory=dict)

    def heldout_partners(self, gene: str) -> set[str]:
        return self.valid_partners.get(gene, set()) | self.test_partners.get(gene, set())

    def all_partners(self, gene: str) -> set[str]:
        return self.train_partners.get(gene, set()) | self.heldout_partners(gene)


def _partner_map(triples: list[Triple]) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    for t in triples:
        out.setdefault(t.head, set()).add(t.tail)
        out.setdefault(t.tail, set()).add(t.head)
    return out


def split_sl_triples(
    kg: KnowledgeGraph, cfg: SplitConfig, sl_relation: str = SL_RELATION
) -> SplitResult:
    """Partition the SL triples 80/10/10; ontology triples stay shared."""
    sl = sorted(t for t in kg.triples() if t.relation == sl_relation)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(sl))
    sl = [sl[i] for i in order]
    n = len(sl)
    n_train = int(cfg.train_frac * n)
    n_valid = int(cfg.valid_frac * n)
    train, valid, test = (
        sl[:n_train],
        sl[n_train : n_train + n_valid],
        sl[n_train + n_valid :],
    )
    return SplitResult(
        config=cfg,
        train=train,
        valid=valid,
        test=test,
        train_partners=_partner_map(train),
        valid_partners=_partner_map(valid),
        test_partners=_partner_map(test),
    )


def training_graph(kg: KnowledgeGraph, split: SplitResult) -> KnowledgeGraph:
    """Copy of the KG with held-out SL triples removed from the encoder input."""
    held = kg.copy()
    held.delete_triples(split.valid + split.test)
    return held


# -- loss ---------------------------------------------------------------------


def sampled_softmax_loss(
    cg: CompiledGraph,
    ent: np.ndarray,
    rel: np.ndarray,
    primary: int,
    pairs: list[tuple[int, list[int]]],
    hops: int = 3,
    compute_grads: bool = True,
):
    """Loss (and gradients) for one primary's (positive, negatives) pairs.

    Positives or negatives not reached by the propagation are skipped;
    candidates can only be scored at a state they actually have.
    """
    prop = propagate(cg, ent, rel, primary, hops)
    state_grads = [np.zeros_like(h) for h in prop.states]
    d_ent = np.zeros_like(ent) if compute_grads else None
    d_rel = np.zeros_like(rel) if compute_grads else None
    eg = ent[primary]
    loss = 0.0
    used = 0
    for positive, negatives in pairs:
        if positive not in prop.last_state:
            continue
        cand = [positive] + [n for n in negatives if n in prop.last_state]
        scores = score_entities(prop, ent, cand)
        m = scores.max()
        lse = m + math.log(np.exp(scores - m).sum())
        loss += lse - scores[0]
        used += 1
        if not compute_grads:
            continue
        dscores = np.exp(scores - lse)
        dscores[0] -= 1.0
        for i, c in enumerate(cand):
            layer, row = prop.last_state[c]
            state_grads[layer][row] += dscores[i] * eg
            d_ent[primary] += dscores[i] * prop.states[layer][row]
    if compute_grads and used:
        backpropagate(cg, ent, rel, prop, state_grads, d_ent, d_rel)
    return loss, used, d_ent, d_rel


# -- training ------------------------------------------------------------------


class Adam:
    def __init__(self, shapes, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params, grads):
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            mhat = m / (1 - self.beta1**self.t)
            vhat = v / (1 - self.beta2**self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


@dataclass
class TrainedModel:
    kg_version: int
    config: ModelConfig
    split_seed: int
    entity_ids: list[str]
    relation_ids: list[str]
    ent: np.ndarray
    rel: np.ndarray
    metrics: dict[str, float]
    loss_curve: list[float]
    train_seconds: float

    def eindex(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.entity_ids)}


def evaluate_ranking(
    cg: CompiledGraph,
    ent: np.ndarray,
    rel: np.ndarray,
    primaries: list[str],
    truth_map: dict[str, set[str]],
    exclude_map: dict[str, set[str]],
    k: int,
    hops: int = 3,
) -> dict[str, float]:
    """Mean filtered-ranking metrics over the given primaries.

    Candidate lists exclude each primary's entries in exclude_map (its
    training partners); hits are membership in truth_map.
    """
    eindex = {e: i for i, e in enumerate(cg.entity_ids)}
    sums = {f"precision@{k}": 0.0, f"recall@{k}": 0.0, f"ndcg@{k}": 0.0}
    n = 0
    for gene in primaries:
        truth = truth_map.get(gene, set())
        if not truth or gene not in eindex:
            continue
        exclude = {eindex[p] for p in exclude_map.get(gene, ()) if p in eindex}
        prop = propagate(cg, ent, rel, eindex[gene], hops)
        ranked = [cg.entity_ids[c] for c, _ in rank_candidates(cg, prop, ent, k, exclude)]
        for key, val in ranking_metrics(ranked, truth, k).items():
            sums[key] += val
        n += 1
    if n == 0:
        return {key: 0.0 for key in sums}
    return {key: val / n for key, val in sums.items()}


def evaluation_truth_map(split: SplitResult) -> dict[str, set[str]]:
    """Evaluation truth per test primary: all held-out partners.

    Training partners are filtered out of the candidate list, so the known
    ground truth a ranked candidate can still hit is the validation+test
    remainder; this mirrors correctness flags taken against the full SL set.
    """
    return {g: split.heldout_partners(g) for g in split.test_partners}


def train(
    kg: KnowledgeGraph,
    split_cfg: SplitConfig,
    config: ModelConfig,
    sl_relation: str = SL_RELATION,
) -> TrainedModel:
    """Train on the 80% SL split with sampled-softmax loss and Adam.

    Early-stops when validation precision@top_k stops improving for
    `patience` epochs; the best-epoch parameters are kept. Held-out SL
    triples are removed from the encoder's graph so candidates are scored
    without seeing their own evaluation edges.
    """
    t0 = time.perf_counter()
    split = split_sl_triples(kg, split_cfg, sl_relation)
    if len(split.train) + len(split.valid) + len(split.test) < 10:
        raise ValueError("degenerate corpus: fewer than 10 SL triples")
    held = training_graph(kg, split)
    cg = compile_graph(held)
    eindex = {e: i for i, e in enumerate(cg.entity_ids)}
    rng = np.random.default_rng(config.seed)
    d = config.embed_dim
    ent = rng.normal(0.0, 1.0 / math.sqrt(d), (cg.n_entities, d))
    rel = rng.normal(0.0, 1.0 / math.sqrt(d), (cg.n_relations, d))

    genes = cg.genes()
    by_primary: dict[int, list[int]] = {}
    neg_pool: dict[int, np.ndarray] = {}
    for gene, partners in split.train_partners.items():
        g = eindex[gene]
        positives = sorted(eindex[p] for p in partners)
        by_primary[g] = positives
        neg_pool[g] = np.setdiff1d(genes, np.array(positives + [g], dtype=np.int64))
    primaries = sorted(by_primary)

    valid_primaries = sorted(split.valid_partners)
    test_primaries = sorted(split.test_partners)

    opt = Adam([ent.shape, rel.shape], lr=config.learning_rate)
    loss_curve: list[float] = []
    best = (-1.0, None, None)
    stale = 0
    for epoch in range(config.epochs):
        order = rng.permutation(len(primaries))
        epoch_loss = 0.0
        epoch_pairs = 0
        for gi in order:
            g = primaries[gi]
            pool = neg_pool[g]
            n_neg = min(config.negatives_per_positive, len(pool))
            prop_pairs = []
            for p in by_primary[g]:
                negs = rng.choice(pool, size=n_neg, replace=False) if n_neg else []
                prop_pairs.append((p, list(negs)))
            loss, used, d_ent, d_rel = sampled_softmax_loss(
                cg, ent, rel, g, prop_pairs, config.hops
            )
            if used:
                opt.step([ent, rel], [d_ent, d_rel])
                epoch_loss += loss
                epoch_pairs += used
        loss_curve.append(epoch_loss / max(1, epoch_pairs))
        val = evaluate_ranking(
            cg,
            ent,
            rel,
            valid_primaries,
            split.valid_partners,
            split.train_partners,
            config.top_k,
            config.hops,
        )
        score = val[f"precision@{config.top_k}"]
        if score > best[0] + 1e-12:
            best = (score, ent.copy(), rel.copy())
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    if best[1] is not None:
        ent, rel = best[1], best[2]
    metrics = evaluate_ranking(
        cg,
        ent,
        rel,
        test_primaries,
        evaluation_truth_map(split),
        split.train_partners,
        config.top_k,
        config.hops,
    )
    return TrainedModel(
        kg_version=kg.version,
        config=config,
        split_seed=split_cfg.seed,
        entity_ids=cg.entity_ids,
        relation_ids=cg.relation_ids,
        ent=ent,
        rel=rel,
        metrics=metrics,
        loss_curve=loss_curve,
        train_seconds=time.perf_counter() - t0,
    )


# -- interpretive paths --------------------------------------------------------


@dataclass
class InterpretivePath:
    nodes: list[str]
    relations: list[str]
    weight: float

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "relations": self.relations, "weight": self.weight}


def extract_paths(
    cg: CompiledGraph,
    prop: Propagation,
    partners: list[int],
    max_paths: int | None = 100,
) -> dict[int, list[InterpretivePath]]:
    """All <=hops-hop walks from the primary to each partner, best-first.

    Walk weight is the product of the hop attention coefficients; expansion
    is weight-ordered (prefix weights always bound extensions), so a
    truncated listing is exactly the top max_paths by weight.
    """
    incoming: list[dict[int, list[tuple[float, int, int]]]] = []
    for t, tr in enumerate(prop.traces, start=1):
        per_node: dict[int, list[tuple[float, int, int]]] = {}
        prev_nodes = prop.nodes[t - 1]
        layer_nodes = prop.nodes[t]
        bounds = list(tr.starts) + [len(tr.alpha)]
        for gi, node in enumerate(layer_nodes):
            entries = []
            for a in range(bounds[gi], bounds[gi + 1]):
                entries.append(
                    (float(tr.alpha[a]), int(prev_nodes[tr.src_rows[a]]), int(tr.rel[a]))
                )
            per_node[int(node)] = entries
        incoming.append(per_node)

    result: dict[int, list[InterpretivePath]] = {}
    for partner in partners:
        heap: list = []
        counter = 0
        for t in range(1, len(prop.traces) + 1):
            if partner in incoming[t - 1]:
                counter += 1
                heappush(heap, (-1.0, counter, t, partner, (partner,), ()))
        paths: list[InterpretivePath] = []
        while heap and (max_paths is None or len(paths) < max_paths):
            negw, _, t, node, suffix_nodes, suffix_rels = heappop(heap)
            w = -negw
            if t == 0:
                paths.append(
                    InterpretivePath(
                        nodes=[cg.entity_ids[x] for x in suffix_nodes],
                        relations=[cg.relation_ids[r] for r in suffix_rels],
                        weight=w,
                    )
                )
                continue
            for alpha, src, r in incoming[t - 1].get(node, ()):
                counter += 1
                heappush(
                    heap,
                    (
                        -(w * alpha),
                        counter,
                        t - 1,
                        src,
                        (src,) + suffix_nodes,
                        (r,) + suffix_rels,
                    ),
                )
        result[partner] = paths
    return result


# -- layer aggregation -----------------------------------------------------------


@dataclass
class LayerAggregate:
    layers: list[dict[str, float]]  # per layer: entity -> normalized weight
    flows: list[dict[str, dict[str, float]]]  # per transition: src type -> dst type -> fraction
    relation_mix: list[dict[str, float]]  # per transition: relation -> fraction

    def to_json(self) -> dict:
        return {
            "layers": self.layers,
            "flows": self.flows,
            "relation_mix": self.relation_mix,
        }


def aggregate_layers(
    paths: list[InterpretivePath], kg: KnowledgeGraph, hops: int = 3
) -> LayerAggregate:
    """Entity weights, type flows and relation proportions per hop layer.

    Each layer normalizes over the paths that occupy it; shorter paths
    contribute only to the layers they reach. Flows and relation mixes are
    normalized per transition over the paths crossing it.
    """
    if not paths:
        return LayerAggregate([], [], [])
    layers: list[dict[str, float]] = []
    for level in range(hops + 1):
        weights: dict[str, float] = {}
        for p in paths:
            if level < len(p.nodes):
                weights[p.nodes[level]] = weights.get(p.nodes[level], 0.0) + p.weight
        total = sum(weights.values())
        layers.append(
            {k: v / total for k, v in sorted(weights.items())} if total else {}
        )
    flows: list[dict[str, dict[str, float]]] = []
    relation_mix: list[dict[str, float]] = []
    for level in range(hops):
        flow: dict[str, dict[str, float]] = {}
        rels: dict[str, float] = {}
        total = 0.0
        for p in paths:
            if level + 1 >= len(p.nodes):
                continue
            src_t = kg.entities[p.nodes[level]].etype.value
            dst_t = kg.entities[p.nodes[level + 1]].etype.value
            flow.setdefault(src_t, {}).setdefault(dst_t, 0.0)
            flow[src_t][dst_t] += p.weight
            rels[p.relations[level]] = rels.get(p.relations[level], 0.0) + p.weight
            total += p.weight
        if total:
            flow = {
                s: {d: w / total for d, w in sorted(ds.items())}
                for s, ds in sorted(flow.items())
            }
            rels = {r: w / total for r, w in sorted(rels.items())}
        flows.append(flow)
        relation_mix.append(rels)
    while layers and not layers[-1]:
        layers.pop()
    return LayerAggregate(layers, flows, relation_mix)


# -- persistence -------------------------------------------------------------------


def save_model(model: TrainedModel, out_dir: str | Path) -> Path:
    """models/<version>/ layout: embeddings.bin + config.json + metrics.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = json.dumps(
        {
            "entity_count": len(model.entity_ids),
            "relation_count": len(model.relation_ids),
            "dim": model.config.embed_dim,
            "entity_ids": model.entity_ids,
            "relation_ids": model.relation_ids,
        },
        sort_keys=True,
    ).encode("utf-8")
    with open(out / "embeddings.bin", "wb") as fh:
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(model.ent.astype("<f8").tobytes(order="C"))
        fh.write(model.rel.astype("<f8").tobytes(order="C"))
    (out / "config.json").write_text(
        json.dumps(
            {
                "config": model.config.to_json(),
                "split_seed": model.split_seed,
                "kg_version": model.kg_version,
                "train_seconds": model.train_seconds,
            },
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    (out / "metrics.json").write_text(
        json.dumps(
            {"metrics": model.metrics, "loss_curve": model.loss_curve},
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return out


def load_model(model_dir: str | Path) -> TrainedModel:
    model_dir = Path(model_dir)
    with open(model_dir / "embeddings.bin", "rb") as fh:
        (hlen,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        n_e, n_r, d = header["entity_count"], header["relation_count"], header["dim"]
        ent = np.frombuffer(fh.read(n_e * d * 8), dtype="<f8").reshape(n_e, d).copy()
        rel = np.frombuffer(fh.read(n_r * d * 8), dtype="<f8").reshape(n_r, d).copy()
    meta = json.loads((model_dir / "config.json").read_text(encoding="utf-8"))
    metrics = json.loads((model_dir / "metrics.json").read_text(encoding="utf-8"))
    return TrainedModel(
        kg_version=meta["kg_version"],
        config=ModelConfig(**meta["config"]),
        split_seed=meta["split_seed"],
        entity_ids=header["entity_ids"],
        relation_ids=header["relation_ids"],
        ent=ent,
        rel=rel,
        metrics=metrics["metrics"],
        loss_curve=metrics["loss_curve"],
        train_seconds=meta["train_seconds"],
    )
