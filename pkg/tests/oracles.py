"""Independent brute-force oracles the implementation is checked against.

Everything here scans raw triple lists with no knowledge of the package's
indexes or propagation traces, so agreement is meaningful.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def scan_matches(triples, etype_of, anchor, pattern):
    """Full-scan metapath matcher over raw (head, rel, tail) tuples."""
    s, r, t = pattern.split("-")
    out = set()
    for h, rel, tl in triples:
        if s == "L" and h != anchor[0]:
            continue
        if s == "H" and etype_of[h] != etype_of[anchor[0]]:
            continue
        if r == "L" and rel != anchor[1]:
            continue
        if t == "L" and tl != anchor[2]:
            continue
        if t == "H" and etype_of[tl] != etype_of[anchor[2]]:
            continue
        out.add((h, rel, tl))
    return out


class VectorScanOracle:
    """Vectorized full-scan lattice counter for one graph."""

    def __init__(self, triples, etype_of):
        ids = sorted({h for h, _, _ in triples} | {t for _, _, t in triples} | set(etype_of))
        self.eix = {e: i for i, e in enumerate(ids)}
        types = sorted(set(etype_of.values()))
        tix = {t: i for i, t in enumerate(types)}
        rels = sorted({r for _, r, _ in triples})
        self.rix = {r: i for i, r in enumerate(rels)}
        self.h = np.array([self.eix[h] for h, _, _ in triples], dtype=np.int64)
        self.r = np.array([self.rix[r] for _, r, _ in triples], dtype=np.int64)
        self.t = np.array([self.eix[t] for _, _, t in triples], dtype=np.int64)
        tcode = np.zeros(len(ids), dtype=np.int64)
        for e, i in self.eix.items():
            tcode[i] = tix[etype_of[e]]
        self.ht = tcode[self.h]
        self.tt = tcode[self.t]
        self.node_type = tcode

    def lattice_counts(self, anchor) -> dict[str, int]:
        hi, ri, ti = self.eix[anchor[0]], self.rix[anchor[1]], self.eix[anchor[2]]
        src = {"L": self.h == hi, "H": self.ht == self.node_type[hi]}
        rel = {"L": self.r == ri, "H": np.ones(len(self.r), dtype=bool)}
        tgt = {"L": self.t == ti, "H": self.tt == self.node_type[ti]}
        counts = {}
        for a in "LH":
            for b in "LH":
                for c in "LH":
                    counts[f"{a}-{b}-{c}"] = int(
                        np.count_nonzero(src[a] & rel[b] & tgt[c])
                    )
        return counts


def bfs_rings(triples, center, max_hops):
    """Undirected BFS rings, the ego-subgraph oracle."""
    adj: dict[str, set[str]] = {}
    for h, _, t in triples:
        adj.setdefault(h, set()).add(t)
        adj.setdefault(t, set()).add(h)
    seen = {center: 0}
    q = deque([center])
    while q:
        node = q.popleft()
        if seen[node] >= max_hops:
            continue
        for other in adj.get(node, ()):
            if other not in seen:
                seen[other] = seen[node] + 1
                q.append(other)
    rings = [set() for _ in range(max_hops + 1)]
    for node, hop in seen.items():
        rings[hop].add(node)
    return rings


def dfs_walks(arcs_by_src, start, max_hops=3):
    """Every directed walk of 1..max_hops hops from start."""
    walks = []

    def rec(node, nodes, rels):
        if rels:
            walks.append((tuple(nodes), tuple(rels)))
        if len(rels) == max_hops:
            return
        for rel, dst in arcs_by_src.get(node, ()):
            rec(dst, nodes + [dst], rels + [rel])

    rec(start, [start], [])
    return walks


def tally_layers(paths, etype_of, hops=3):
    """Aggregation oracle: plain dict arithmetic over a path list."""
    layers = []
    for level in range(hops + 1):
        acc = {}
        for nodes, _, w in paths:
            if level < len(nodes):
                acc[nodes[level]] = acc.get(nodes[level], 0.0) + w
        z = sum(acc.values())
        layers.append({k: v / z for k, v in acc.items()} if z else {})
    flows, rel_mix = [], []
    for level in range(hops):
        f, rm, z = {}, {}, 0.0
        for nodes, rels, w in paths:
            if level + 1 >= len(nodes):
                continue
            key = (etype_of[nodes[level]], etype_of[nodes[level + 1]])
            f[key] = f.get(key, 0.0) + w
            rm[rels[level]] = rm.get(rels[level], 0.0) + w
            z += w
        flows.append({k: v / z for k, v in f.items()} if z else {})
        rel_mix.append({k: v / z for k, v in rm.items()} if z else {})
    while layers and not layers[-1]:
        layers.pop()
    return layers, flows, rel_mix


def random_kg(rng, n_entities=None, n_triples=None):
    """A random typed triple store for property tests; returns raw pieces."""
    n_entities = n_entities or int(rng.integers(5, 40))
    n_triples = n_triples or int(rng.integers(1, 200))
    types = ["Gene", "BP", "MF", "CC", "Pathway"]
    ids = [f"e{i}" for i in range(n_entities)]
    etype_of = {e: types[int(rng.integers(0, len(types)))] for e in ids}
    rels = [f"r{i}" for i in range(int(rng.integers(1, 6)))]
    triples = set()
    for _ in range(n_triples):
        h = ids[int(rng.integers(0, n_entities))]
        t = ids[int(rng.integers(0, n_entities))]
        r = rels[int(rng.integers(0, len(rels)))]
        if h != t:
            triples.add((h, r, t))
    return ids, etype_of, rels, sorted(triples)
